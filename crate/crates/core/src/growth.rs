//! Growth envelopes, rate exponents, asymptotics of the weights, and
//! Mittag-Leffler type functions.

use std::fmt;

use rug::ops::Pow;
use rug::{Assign, Float};
use thiserror::Error;

use crate::dunkl::DunklWeights;
use crate::means::{mean_p_fast, Exponent};
use crate::numeric::{log_gamma, HighComplex, NumericError};
use crate::series::TruncatedSeries;

/// Points in [`standard_grid`].
pub const STANDARD_GRID_POINTS: usize = 256;
pub const STANDARD_GRID_MIN: f64 = 0.01;
pub const STANDARD_GRID_MAX: f64 = 400.0;

/// Largest number of terms summed by [`mittag_leffler`].
pub const MITTAG_LEFFLER_MAX_TERMS: usize = 1_000_000;

/// Number of consecutive negligible terms that ends a series.
const SMALL_TERM_RUN: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrowthError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("series did not converge within {0} terms")]
    NonConvergence(usize),
    #[error("sampled envelope violates its kind: {0}")]
    Envelope(String),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvelopeKind {
    /// Nondecreasing and unbounded.
    ToInfinity,
    /// Nonincreasing with limit zero.
    ToZero,
    Constant,
}

/// Positive piecewise-linear function given by samples; constant beyond
/// the sampled range.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledEnvelope {
    kind: EnvelopeKind,
    r: Vec<f64>,
    values: Vec<f64>,
}

impl SampledEnvelope {
    pub fn new(kind: EnvelopeKind, r: Vec<f64>, values: Vec<f64>) -> Result<Self, GrowthError> {
        if r.is_empty() || r.len() != values.len() {
            return Err(GrowthError::Envelope("need matching, nonempty r and value lists".into()));
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GrowthError::Envelope("r must be strictly increasing".into()));
        }
        if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(GrowthError::Envelope("values must be positive and finite".into()));
        }
        let ok = match kind {
            EnvelopeKind::ToInfinity => values.windows(2).all(|w| w[1] >= w[0]) && values.last() > values.first(),
            EnvelopeKind::ToZero => values.windows(2).all(|w| w[1] <= w[0]) && values.last() < values.first(),
            EnvelopeKind::Constant => values.windows(2).all(|w| w[1] == w[0]),
        };
        if !ok {
            return Err(GrowthError::Envelope(format!("samples are not {kind:?}")));
        }
        Ok(SampledEnvelope { kind, r, values })
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.r.partition_point(|&r| r <= x);
        if i == 0 {
            return self.values[0];
        }
        if i == self.r.len() {
            return *self.values.last().unwrap();
        }
        let (r0, r1) = (self.r[i - 1], self.r[i]);
        let t = (x - r0) / (r1 - r0);
        self.values[i - 1] * (1.0 - t) + self.values[i] * t
    }
}

/// The slowly varying factor in front of the critical rate.
#[derive(Clone, Debug, PartialEq)]
pub enum RateEnvelope {
    /// `ln(e + r)`.
    LogGrowth,
    /// `1 / ln(e + r)`.
    InverseLog,
    Constant(f64),
    Sampled(SampledEnvelope),
}

impl Default for RateEnvelope {
    fn default() -> Self {
        RateEnvelope::LogGrowth
    }
}

impl RateEnvelope {
    pub fn kind(&self) -> EnvelopeKind {
        match self {
            RateEnvelope::LogGrowth => EnvelopeKind::ToInfinity,
            RateEnvelope::InverseLog => EnvelopeKind::ToZero,
            RateEnvelope::Constant(_) => EnvelopeKind::Constant,
            RateEnvelope::Sampled(s) => s.kind,
        }
    }

    /// Value at `r`, at the precision of `r`.
    pub fn eval(&self, r: &Float) -> Float {
        let prec = r.prec();
        match self {
            RateEnvelope::LogGrowth => {
                let e = Float::with_val(prec, 1).exp();
                (e + r).ln()
            }
            RateEnvelope::InverseLog => {
                let e = Float::with_val(prec, 1).exp();
                (e + r).ln().recip()
            }
            RateEnvelope::Constant(c) => Float::with_val(prec, *c),
            RateEnvelope::Sampled(s) => Float::with_val(prec, s.eval(r.to_f64())),
        }
    }

    /// Accepts `log`, `inverse_log` and `constant:<c>`.
    pub fn parse(s: &str) -> Result<Self, GrowthError> {
        let t = s.trim();
        match t {
            "log" => Ok(RateEnvelope::LogGrowth),
            "inverse_log" => Ok(RateEnvelope::InverseLog),
            _ => match t.strip_prefix("constant:").map(|c| c.trim().parse::<f64>()) {
                Some(Ok(c)) if c > 0.0 && c.is_finite() => Ok(RateEnvelope::Constant(c)),
                _ => Err(GrowthError::Parameter(format!("unknown envelope `{t}`"))),
            },
        }
    }

    /// Checks the monotonicity and positivity promised by the kind on a
    /// grid of radii.
    pub fn check_on(&self, grid: &[Float]) -> Result<(), GrowthError> {
        let v: Vec<Float> = grid.iter().map(|r| self.eval(r)).collect();
        if v.iter().any(|x| *x <= 0 || !x.is_finite()) {
            return Err(GrowthError::Envelope("not positive on the grid".into()));
        }
        let ok = match self.kind() {
            EnvelopeKind::ToInfinity => v.windows(2).all(|w| w[1] >= w[0]),
            EnvelopeKind::ToZero => v.windows(2).all(|w| w[1] <= w[0]),
            EnvelopeKind::Constant => v.windows(2).all(|w| w[1] == w[0]),
        };
        if ok {
            Ok(())
        } else {
            Err(GrowthError::Envelope(format!("not {:?} on the grid", self.kind())))
        }
    }
}

impl fmt::Display for RateEnvelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateEnvelope::LogGrowth => write!(f, "log"),
            RateEnvelope::InverseLog => write!(f, "inverse_log"),
            RateEnvelope::Constant(c) => write!(f, "constant:{c}"),
            RateEnvelope::Sampled(_) => write!(f, "sampled"),
        }
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize, prec: u32) -> Vec<Float> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let lo_f = Float::with_val(prec, lo);
    let ln_ratio = Float::with_val(prec, hi).ln() - Float::with_val(prec, lo).ln();
    (0..n)
        .map(|i| {
            if i + 1 == n {
                return Float::with_val(prec, hi);
            }
            let t = Float::with_val(prec, &ln_ratio * i as u64) / (n - 1) as u64;
            Float::with_val(prec, &lo_f * t.exp())
        })
        .collect()
}

/// 256 log-spaced radii in `[0.01, 400]`.
pub fn standard_grid(prec: u32) -> Vec<Float> {
    log_grid(STANDARD_GRID_MIN, STANDARD_GRID_MAX, STANDARD_GRID_POINTS, prec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateKind {
    /// Critical exponent for hypercyclicity.
    Hc,
    /// Exponent of the permissible rate for frequent hypercyclicity.
    FhcUpper,
    /// Exponent of the excluded rate for frequent hypercyclicity.
    FhcLower,
}

/// `a` in the envelope `e^r / r^a`: `alpha + 1`,
/// `alpha + 1/2 + 1/(2 max(2, p))` or `alpha + 1/2 + 1/(2 min(2, p))`,
/// where `1/(2p)` is zero at `p = inf`.
pub fn rate_exponent(p: Exponent, alpha: &Float, which: RateKind) -> Float {
    let prec = alpha.prec();
    let half = Float::with_val(prec, 0.5);
    let inv = |x: Exponent| -> Float {
        match x {
            Exponent::Infinity => Float::new(prec),
            Exponent::Finite(p) => Float::with_val(prec, 2.0 * p).recip(),
        }
    };
    let two = Exponent::Finite(2.0);
    match which {
        RateKind::Hc => Float::with_val(prec, alpha + 1u32),
        RateKind::FhcUpper => {
            let m = if p.as_f64() > 2.0 { p } else { two };
            Float::with_val(prec, alpha + &half) + inv(m)
        }
        RateKind::FhcLower => {
            let m = if p.as_f64() < 2.0 { p } else { two };
            Float::with_val(prec, alpha + &half) + inv(m)
        }
    }
}

/// `ln[d_n e^{n+alpha+1} / (n+alpha+1)^{n+alpha+1}]`.
pub fn lemma1_log_ratio(n: usize, w: &DunklWeights) -> Float {
    let wp = w.precision() + 32;
    let x = Float::with_val(wp, w.alpha() + (n + 1) as u64);
    let mut out = w.log_d(n);
    out += &x;
    out -= Float::with_val(wp, x.ln_ref()) * &x;
    Float::with_val(w.precision(), out)
}

/// `d_n e^{n+alpha+1} / (n+alpha+1)^{n+alpha+1}`, computed in the log
/// domain.
pub fn lemma1_ratio(n: usize, w: &DunklWeights) -> Float {
    lemma1_log_ratio(n, w).exp()
}

/// Smallest and largest [`lemma1_ratio`] over `0..=n_max`.
pub fn lemma1_band(w: &DunklWeights, n_max: usize) -> (Float, Float) {
    let mut lo = lemma1_ratio(0, w);
    let mut hi = lo.clone();
    for n in 1..=n_max {
        let v = lemma1_ratio(n, w);
        if v < lo {
            lo = v;
        } else if v > hi {
            hi = v;
        }
    }
    (lo, hi)
}

/// `E(z) = sum_n z^n / ((n + theta)^beta Gamma(ml_alpha n + 1))`, summed
/// until the next term stays below `tol |sum|` for eight terms in a row.
pub fn mittag_leffler(
    z: &HighComplex,
    ml_alpha: &Float,
    theta: &Float,
    beta: &Float,
    tol: &Float,
) -> Result<HighComplex, GrowthError> {
    let prec = z.prec();
    if !(*ml_alpha > 0 && *ml_alpha <= 2) {
        return Err(GrowthError::Parameter(format!("ml_alpha must lie in (0, 2], got {ml_alpha}")));
    }
    if *theta <= 0 {
        return Err(GrowthError::Parameter(format!("theta must be positive, got {theta}")));
    }
    let integer_alpha = ml_alpha.to_integer().filter(|_| ml_alpha.is_integer()).and_then(|i| i.to_u32());
    let beta_zero = beta.is_zero();
    let tol = Float::with_val(prec, tol);

    // term_n = z^n / Gamma(alpha n + 1), before the (n + theta)^-beta factor.
    let mut power_term = HighComplex::one(prec);
    let mut sum = HighComplex::zero(prec);
    let mut scratch = HighComplex::zero(prec);
    let mut tmp = Float::new(prec);
    let mut run = 0usize;
    let mut z_pow = HighComplex::one(prec);
    for n in 0..MITTAG_LEFFLER_MAX_TERMS {
        let term = if n == 0 {
            let mut t = HighComplex::one(prec);
            if !beta_zero {
                t.scale_assign(&Float::with_val(prec, theta.pow(beta)).recip());
            }
            t
        } else {
            match integer_alpha {
                Some(k) => {
                    scratch.assign_mul(&power_term, z, &mut tmp);
                    std::mem::swap(&mut power_term, &mut scratch);
                    let base = (n as u64 - 1) * k as u64;
                    for j in 1..=k as u64 {
                        power_term.re /= base + j;
                        power_term.im /= base + j;
                    }
                }
                None => {
                    scratch.assign_mul(&z_pow, z, &mut tmp);
                    std::mem::swap(&mut z_pow, &mut scratch);
                    let arg = Float::with_val(prec, ml_alpha * n as u64) + 1u32;
                    let lg = log_gamma(&arg)?;
                    power_term = z_pow.scale(&Float::with_val(prec, -&lg).exp());
                }
            }
            let mut t = power_term.clone();
            if !beta_zero {
                let d = Float::with_val(prec, theta + n as u64).pow(beta);
                t.re /= &d;
                t.im /= &d;
            }
            t
        };
        let small = term.abs() <= Float::with_val(prec, sum.abs() * &tol);
        sum += &term;
        if small && n > 0 {
            run += 1;
            if run >= SMALL_TERM_RUN {
                return Ok(sum);
            }
        } else {
            run = 0;
        }
    }
    Err(GrowthError::NonConvergence(MITTAG_LEFFLER_MAX_TERMS))
}

/// Leading term `ml_alpha^{beta-1} r^{-beta/ml_alpha} e^{r^{1/ml_alpha}}` of
/// the large-`r` expansion of [`mittag_leffler`]. `theta` only enters the
/// correction terms.
pub fn barnes_asymptotic(r: &Float, ml_alpha: &Float, _theta: &Float, beta: &Float) -> Float {
    let prec = r.prec();
    let inv_a = Float::with_val(prec, ml_alpha.recip_ref());
    let mut out = Float::with_val(prec, ml_alpha.pow(Float::with_val(prec, beta - 1u32)));
    out *= Float::with_val(prec, r.pow(-Float::with_val(prec, beta * &inv_a)));
    out *= Float::with_val(prec, r.pow(&inv_a)).exp();
    out
}

/// Result of comparing [`mittag_leffler`] with [`barnes_asymptotic`] on a
/// set of radii.
#[derive(Clone, Debug)]
pub struct BarnesFit {
    pub r: Vec<Float>,
    pub ratio: Vec<Float>,
    /// `|ratio - 1|`.
    pub residual: Vec<Float>,
    /// `residual * r^{1/ml_alpha}`.
    pub k: Vec<Float>,
    /// Residuals at or below this are treated as exactly zero.
    pub noise_floor: Float,
    /// Least-squares slope of `ln residual` against `ln r` over residuals
    /// above the noise floor.
    pub slope: Option<f64>,
    pub within_band: bool,
    pub consistent: bool,
}

/// Ratio band accepted by [`barnes_residual_fit`].
pub const BARNES_BAND: (f64, f64) = (0.95, 1.05);

/// Residuals must either vanish to working precision or decay with a
/// negative slope while `K_i = residual_i r_i^{1/ml_alpha}` stays within a
/// factor two of its first value.
pub fn barnes_residual_fit(ml_alpha: &Float, theta: &Float, beta: &Float, radii: &[Float]) -> Result<BarnesFit, GrowthError> {
    let prec = ml_alpha.prec();
    let tol = Float::with_val(prec, 1) >> prec;
    let noise_floor = Float::with_val(prec, 1) >> (prec as i32 - 20);
    let inv_a = Float::with_val(prec, ml_alpha.recip_ref());
    let mut fit = BarnesFit {
        r: radii.to_vec(),
        ratio: Vec::new(),
        residual: Vec::new(),
        k: Vec::new(),
        noise_floor: noise_floor.clone(),
        slope: None,
        within_band: true,
        consistent: true,
    };
    for r in radii {
        let e = mittag_leffler(&HighComplex::from_real(Float::with_val(prec, r)), ml_alpha, theta, beta, &tol)?;
        let b = barnes_asymptotic(&Float::with_val(prec, r), ml_alpha, theta, beta);
        let ratio = Float::with_val(prec, &e.re / &b);
        let residual = Float::with_val(prec, &ratio - 1u32).abs();
        let k = Float::with_val(prec, &residual * Float::with_val(prec, r.pow(&inv_a)));
        if ratio < BARNES_BAND.0 || ratio > BARNES_BAND.1 {
            fit.within_band = false;
        }
        fit.ratio.push(ratio);
        fit.residual.push(residual);
        fit.k.push(k);
    }
    let points: Vec<(f64, f64)> = fit
        .r
        .iter()
        .zip(&fit.residual)
        .filter(|(_, res)| **res > noise_floor)
        .map(|(r, res)| (crate::numeric::ln_abs_approx(r), crate::numeric::ln_abs_approx(res)))
        .collect();
    if points.len() >= 2 {
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        fit.slope = Some(sxy / sxx);
    }
    let decaying = if points.is_empty() {
        true
    } else {
        let k0 = &fit.k[0];
        let bound = Float::with_val(prec, k0 * 2u32);
        fit.slope.map_or(false, |s| s < 0.0) && fit.k.iter().all(|k| *k <= bound)
    };
    fit.consistent = fit.within_band && decaying;
    Ok(fit)
}

/// `[sum_n (r^n / d_n)^q] / [e^r / r^a]^q` with `a = alpha + 1/2 + 1/(2p)`
/// and `1/p + 1/q = 1`.
///
/// With `n_terms = None` the sum runs until, past the largest term, the
/// next term drops below `2^-prec` of the running sum.
pub fn lemma3_ratio(r: &Float, q: f64, w: &DunklWeights, n_terms: Option<usize>) -> Result<Float, GrowthError> {
    let prec = w.precision();
    if !(1.0..=2.0).contains(&q) {
        return Err(GrowthError::Parameter(format!("q must lie in [1, 2], got {q}")));
    }
    if *r <= 0 {
        return Err(GrowthError::Parameter("r must be positive".into()));
    }
    let wp = prec + 32;
    let qf = Float::with_val(wp, q);
    let inv_p = Float::with_val(wp, 1u32) - Float::with_val(wp, qf.recip_ref());
    let a = Float::with_val(wp, w.alpha() + 0.5f64) + Float::with_val(wp, &inv_p / 2u32);
    let ln_r = Float::with_val(wp, r.ln_ref());
    let cutoff = -(f64::from(prec) + 8.0) * std::f64::consts::LN_2;
    let r_f64 = r.to_f64();

    // Running log-sum-exp: total = exp(shift) * scaled.
    let mut shift = Float::new(wp);
    let mut scaled = Float::new(wp);
    let mut log_term = Float::new(wp);
    let mut diff = Float::new(wp);
    let mut n = 0usize;
    loop {
        log_term.assign(&ln_r * n as u64);
        log_term -= w.log_d(n);
        log_term *= &qf;
        if n == 0 {
            shift.assign(&log_term);
            scaled.assign(1u32);
        } else {
            diff.assign(&log_term - &shift);
            if diff > 0 {
                scaled *= Float::with_val(wp, -&diff).exp();
                scaled += 1u32;
                shift.assign(&log_term);
            } else {
                let rel = diff.to_f64() - scaled.to_f64().ln();
                scaled += Float::with_val(wp, diff.exp_ref());
                if n_terms.is_none() && (n as f64) > r_f64 && rel < cutoff {
                    break;
                }
            }
        }
        n += 1;
        if let Some(limit) = n_terms {
            if n > limit {
                break;
            }
        }
        if n > MITTAG_LEFFLER_MAX_TERMS {
            return Err(GrowthError::NonConvergence(n));
        }
    }
    let mut log_ratio = Float::with_val(wp, scaled.ln_ref()) + &shift;
    let log_env = Float::with_val(wp, r - Float::with_val(wp, &a * &ln_r));
    log_ratio -= Float::with_val(wp, &qf * &log_env);
    Ok(Float::with_val(prec, log_ratio.exp_ref()))
}

/// Supremum of [`lemma3_ratio`] over `grid` and the radius attaining it.
pub fn lemma3_sup(q: f64, w: &DunklWeights, grid: &[Float]) -> Result<(Float, Float), GrowthError> {
    let mut best = Float::new(w.precision());
    let mut arg = grid.first().cloned().unwrap_or_else(|| Float::new(w.precision()));
    for r in grid {
        let v = lemma3_ratio(r, q, w, None)?;
        if v > best {
            best = v;
            arg = r.clone();
        }
    }
    Ok((best, arg))
}

/// `M_p(f, r) r^a / (envelope(r) e^r)` on a grid of radii.
#[derive(Clone, Debug)]
pub struct GrowthProfile {
    pub r_grid: Vec<Float>,
    pub ratios: Vec<Float>,
    pub a: Float,
    pub p: Exponent,
    /// Smallest index from which every later ratio is at most one.
    pub satisfied_from: Option<usize>,
}

impl GrowthProfile {
    pub fn max_ratio(&self) -> Float {
        self.ratios.iter().fold(Float::new(self.a.prec()), |m, v| m.max(v))
    }
}

/// Computes the profile with double-precision circle sampling
/// ([`mean_p_fast`]) at the default quadrature size.
pub fn growth_profile(f: &TruncatedSeries, p: Exponent, a: &Float, env: &RateEnvelope, r_grid: &[Float]) -> GrowthProfile {
    growth_profile_with_points(f, p, a, env, r_grid, None)
}

pub fn growth_profile_with_points(
    f: &TruncatedSeries,
    p: Exponent,
    a: &Float,
    env: &RateEnvelope,
    r_grid: &[Float],
    quad_points: Option<usize>,
) -> GrowthProfile {
    let prec = f.precision();
    let ratios: Vec<Float> = r_grid
        .iter()
        .map(|r| {
            let r = Float::with_val(prec, r);
            let m = mean_p_fast(&f.circle_terms(&r), prec, p, quad_points);
            if m.is_zero() {
                return m;
            }
            weight_factor(&r, a, env) * m
        })
        .collect();
    let satisfied_from = satisfied_from(&ratios);
    GrowthProfile {
        r_grid: r_grid.to_vec(),
        ratios,
        a: a.clone(),
        p,
        satisfied_from,
    }
}

/// `r^a / (envelope(r) e^r)`.
pub fn weight_factor(r: &Float, a: &Float, env: &RateEnvelope) -> Float {
    let prec = r.prec();
    let mut log = Float::with_val(prec, r.ln_ref()) * a;
    log -= r;
    log -= env.eval(r).ln();
    log.exp()
}

/// Smallest index `i` with `ratios[j] <= 1` for every `j >= i`; `None` if
/// the last ratio exceeds one.
pub fn satisfied_from(ratios: &[Float]) -> Option<usize> {
    let mut start = ratios.len();
    for (i, v) in ratios.iter().enumerate().rev() {
        if *v > 1 {
            break;
        }
        start = i;
    }
    if start == ratios.len() && !ratios.is_empty() {
        None
    } else {
        Some(start.min(ratios.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::relative_error;

    const P: u32 = 256;

    fn f(v: f64) -> Float {
        Float::with_val(P, v)
    }

    #[test]
    fn exponents() {
        let a = f(0.3);
        assert_eq!(rate_exponent(Exponent::Infinity, &a, RateKind::FhcUpper), f(0.3) + 0.5f64);
        let two = Exponent::Finite(2.0);
        let up = rate_exponent(two, &a, RateKind::FhcUpper);
        assert_eq!(up, rate_exponent(two, &a, RateKind::FhcLower));
        assert!(relative_error(&up, &(f(0.3) + 0.75f64)) < 1e-70);
        assert_eq!(rate_exponent(Exponent::Finite(1.0), &a, RateKind::FhcLower), f(0.3) + 1u32);
        assert_eq!(rate_exponent(Exponent::Finite(4.0), &a, RateKind::Hc), f(0.3) + 1u32);
    }

    #[test]
    fn lemma1_examples() {
        let w0 = DunklWeights::from_f64(0.0, 8, P).unwrap();
        assert!(relative_error(&lemma1_ratio(0, &w0), &f(1.0).exp()) < 1e-70);
        let near = DunklWeights::from_f64(-0.5 + 1e-11, 8, P).unwrap();
        let want = f(1.5).exp() / f(1.5).pow(f(1.5));
        assert!(relative_error(&lemma1_ratio(1, &near), &want) < 1e-9);
        assert!((lemma1_ratio(1, &near).to_f64() - 2.4395).abs() < 1e-4);
    }

    #[test]
    fn mittag_leffler_closed_forms() {
        let tol = f(1.0) >> P;
        let one = HighComplex::one(P);
        let e = mittag_leffler(&one, &f(1.0), &f(1.0), &f(0.0), &tol).unwrap();
        assert!(relative_error(&e.re, &f(1.0).exp()) < 1e-70);
        let c = mittag_leffler(&HighComplex::from_f64(P, 4.0, 0.0), &f(2.0), &f(1.0), &f(0.0), &tol).unwrap();
        assert!(relative_error(&c.re, &f(2.0).cosh()) < 1e-70);
        // Non-integer order through log_gamma: E_{1/2}(0) = 1 and the
        // theta-beta weighting reproduces (e^z - 1)/z for alpha = 1.
        let h = mittag_leffler(&HighComplex::from_f64(P, 2.0, 0.0), &f(1.0), &f(1.0), &f(1.0), &tol).unwrap();
        let want = (f(2.0).exp() - 1u32) / 2u32;
        assert!(relative_error(&h.re, &want) < 1e-70);
        let half = mittag_leffler(&HighComplex::from_f64(P, 1.0, 0.0), &f(0.5), &f(1.0), &f(0.0), &tol).unwrap();
        // E_{1/2}(1) = e (1 + erf 1).
        let erf1 = f(1.0).erf();
        let want = f(1.0).exp() * (erf1 + 1u32);
        assert!(relative_error(&half.re, &want) < 1e-60);
        assert!(mittag_leffler(&one, &f(2.5), &f(1.0), &f(0.0), &tol).is_err());
    }

    #[test]
    fn barnes_leading_terms() {
        let r = f(30.0);
        assert_eq!(barnes_asymptotic(&r, &f(1.0), &f(1.0), &f(0.0)), r.clone().exp());
        let b = barnes_asymptotic(&f(100.0), &f(2.0), &f(1.0), &f(0.0));
        assert!(relative_error(&b, &(f(10.0).exp() / 2u32)) < 1e-70);
        let tol = f(1.0) >> P;
        let ml = mittag_leffler(&HighComplex::from_f64(P, 100.0, 0.0), &f(2.0), &f(1.0), &f(0.0), &tol).unwrap();
        assert!(relative_error(&ml.re, &b) < 1e-8);
    }

    #[test]
    fn lemma3_small_radius_and_truncation() {
        let w = DunklWeights::from_f64(0.0, 1024, P).unwrap();
        let tiny = lemma3_ratio(&f(1e-6), 1.5, &w, None).unwrap();
        assert!(tiny < 1e-6);
        // The automatic cutoff agrees with a generous fixed one.
        let auto = lemma3_ratio(&f(50.0), 2.0, &w, None).unwrap();
        let fixed = lemma3_ratio(&f(50.0), 2.0, &w, Some(600)).unwrap();
        assert!(relative_error(&auto, &fixed) < 1e-70);
        assert!(lemma3_ratio(&f(1.0), 2.5, &w, None).is_err());
    }

    #[test]
    fn lemma3_matches_direct_sum() {
        let w = DunklWeights::from_f64(1.0, 256, P).unwrap();
        let r = f(7.0);
        let mut sum = Float::new(P);
        for n in 0..=200 {
            sum += (f(7.0).pow(n as u32) / w.d(n)).pow(1.5f64);
        }
        let a = f(1.0) + 0.5f64 + (f(1.0) - f(1.5).recip()) / 2u32;
        let env = (r.clone().exp() / r.clone().pow(&a)).pow(1.5f64);
        let want = sum / env;
        assert!(relative_error(&lemma3_ratio(&r, 1.5, &w, None).unwrap(), &want) < 1e-60);
    }

    #[test]
    fn envelopes() {
        let grid = standard_grid(P);
        assert_eq!(grid.len(), 256);
        assert!(relative_error(&grid[0], &f(0.01)) < 1e-70);
        assert_eq!(grid[255], 400);
        RateEnvelope::LogGrowth.check_on(&grid).unwrap();
        RateEnvelope::InverseLog.check_on(&grid).unwrap();
        RateEnvelope::Constant(2.0).check_on(&grid).unwrap();
        assert_eq!(RateEnvelope::parse("constant:2.5").unwrap(), RateEnvelope::Constant(2.5));
        assert!(RateEnvelope::parse("bogus").is_err());
        assert!(SampledEnvelope::new(EnvelopeKind::ToInfinity, vec![1.0, 2.0], vec![2.0, 1.0]).is_err());
        let s = SampledEnvelope::new(EnvelopeKind::ToZero, vec![1.0, 3.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(RateEnvelope::Sampled(s).eval(&f(2.0)), 1.5);
    }

    #[test]
    fn profiles() {
        let grid = standard_grid(P);
        let zero = TruncatedSeries::zero(16, P);
        let prof = growth_profile(&zero, Exponent::Infinity, &f(1.0), &RateEnvelope::LogGrowth, &grid);
        assert!(prof.ratios.iter().all(|v| v.is_zero()));
        assert_eq!(prof.satisfied_from, Some(0));

        let z5 = TruncatedSeries::monomial(5, &HighComplex::one(P), 16, P).unwrap();
        let prof = growth_profile(&z5, Exponent::Finite(2.0), &f(3.0), &RateEnvelope::LogGrowth, &grid);
        assert!(prof.ratios[255] < 1e-150);
        assert!(prof.satisfied_from.is_some());

        assert_eq!(satisfied_from(&[f(2.0), f(0.5), f(3.0), f(0.1)]), Some(3));
        assert_eq!(satisfied_from(&[f(0.5), f(3.0)]), None);
    }
}
