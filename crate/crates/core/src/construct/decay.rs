use rug::Float;

use super::ConstructError;
use crate::dunkl::DunklWeights;
use crate::series::TruncatedSeries;

/// Averages `sigma_m = (1/m) sum_{n<=m} (|c_n| d_n)^q` and the orbit events
/// `|Lambda^n f(0)| = |c_n| d_n > 1`.
#[derive(Clone, Debug)]
pub struct DecayReport {
    pub q: f64,
    pub horizon: usize,
    /// `sigma[m - 1] = sigma_m` for `m = 1..=horizon`.
    pub sigma: Vec<Float>,
    /// `events[m - 1]` counts the events with `1 <= n <= m`.
    pub events: Vec<usize>,
}

impl DecayReport {
    pub fn sigma_at(&self, m: usize) -> &Float {
        &self.sigma[m - 1]
    }

    pub fn event_fraction(&self, m: usize) -> f64 {
        self.events[m - 1] as f64 / m as f64
    }

    /// Smallest `sigma_m` over `m` in `[M/2, M]`.
    pub fn window_sigma_min(&self) -> Float {
        let lo = (self.horizon / 2).max(1);
        (lo..=self.horizon)
            .map(|m| self.sigma_at(m).clone())
            .reduce(|a, b| a.min(&b))
            .unwrap_or_else(|| Float::new(53))
    }

    /// Largest event fraction over `m` in `[M/2, M]`.
    pub fn window_event_max(&self) -> f64 {
        let lo = (self.horizon / 2).max(1);
        (lo..=self.horizon).map(|m| self.event_fraction(m)).fold(0.0, f64::max)
    }

    /// Whether the event fraction stays below `sigma_m` for every `m`: each
    /// event contributes more than one to the sum.
    pub fn bound_holds(&self) -> bool {
        (1..=self.horizon).all(|m| self.sigma_at(m).to_f64() >= self.event_fraction(m))
    }
}

pub fn density_decay_check(
    f: &TruncatedSeries,
    w: &DunklWeights,
    q: f64,
    horizon: usize,
) -> Result<DecayReport, ConstructError> {
    if !(1.0..=2.0).contains(&q) {
        return Err(ConstructError::Parameter(format!("q = {q} must lie in [1, 2]")));
    }
    if horizon == 0 || horizon > f.trunc_degree() {
        return Err(ConstructError::Parameter(format!(
            "horizon {horizon} must lie in 1..={}",
            f.trunc_degree()
        )));
    }
    let prec = f.precision();
    let mut sum = Float::new(prec);
    let mut count = 0usize;
    let mut sigma = Vec::with_capacity(horizon);
    let mut events = Vec::with_capacity(horizon);
    for n in 0..=horizon {
        let c = &f.coeffs()[n];
        if !c.is_zero() {
            let log = Float::with_val(prec, c.abs().ln()) + w.log_d(n);
            if n >= 1 && log > 0 {
                count += 1;
            }
            sum += Float::with_val(prec, log * q).exp();
        }
        if n >= 1 {
            sigma.push(Float::with_val(prec, &sum / n as u64));
            events.push(count);
        }
    }
    Ok(DecayReport { q, horizon, sigma, events })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::HighComplex;

    const P: u32 = 128;

    #[test]
    fn polynomial_decays_like_one_over_m() {
        let w = DunklWeights::from_f64(0.5, 256, P).unwrap();
        let f = TruncatedSeries::from_f64(&[(1.0, 0.0), (0.0, 2.0), (3.0, 0.0)], 256, P).unwrap();
        let rep = density_decay_check(&f, &w, 1.5, 256).unwrap();
        let total = rep.sigma_at(2).clone() * 2u32;
        for m in [10usize, 100, 256] {
            let expected = Float::with_val(P, &total / m as u64);
            assert!(crate::numeric::relative_error(rep.sigma_at(m), &expected) < 1e-30);
        }
        assert!(rep.bound_holds());
    }

    #[test]
    fn reciprocal_weights_give_no_decay() {
        let w = DunklWeights::from_f64(0.0, 200, P).unwrap();
        let coeffs = (0..=200).map(|n| HighComplex::from_real(w.d(n).recip())).collect();
        let f = TruncatedSeries::from_coeffs(coeffs, P).unwrap();
        let rep = density_decay_check(&f, &w, 1.0, 200).unwrap();
        for m in [1usize, 7, 200] {
            let expected = (m + 1) as f64 / m as f64;
            assert!((rep.sigma_at(m).to_f64() - expected).abs() < 1e-20);
        }
        assert!(rep.bound_holds());
    }

    #[test]
    fn rejects_bad_exponent() {
        let w = DunklWeights::from_f64(0.0, 8, P).unwrap();
        let f = TruncatedSeries::zero(8, P);
        assert!(density_decay_check(&f, &w, 3.0, 8).is_err());
        assert!(density_decay_check(&f, &w, 1.0, 9).is_err());
    }
}
