//! Integral means `M_p(f, r)` on circles and the Hausdorff-Young comparison.

use std::fmt;

use rug::ops::Pow;
use rug::Float;
use thiserror::Error;

use crate::numeric::{pi, HighComplex};
use crate::series::circle::modulus_at_angle_f64;
use crate::series::{CircleTerms, TruncatedSeries};

/// Smallest quadrature size used when none is given.
pub const MIN_QUAD_POINTS: usize = 4096;

const GOLDEN_ITERATIONS: usize = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeansError {
    #[error("exponent must lie in [1, inf], got {0}")]
    Exponent(f64),
    #[error("Hausdorff-Young needs 1 < p <= 2, got {0}")]
    HausdorffYoungRange(String),
    #[error("radius must be positive, got {0}")]
    Radius(f64),
}

/// An exponent `p` in `[1, inf]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self, MeansError> {
        if p.is_infinite() && p > 0.0 {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(MeansError::Exponent(p))
        }
    }

    /// `q` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    /// `1/p` with `1/inf = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Infinity => 0.0,
            Exponent::Finite(p) => 1.0 / p,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Infinity => f64::INFINITY,
            Exponent::Finite(p) => p,
        }
    }

    pub fn parse(s: &str) -> Result<Self, MeansError> {
        let t = s.trim().to_ascii_lowercase();
        if matches!(t.as_str(), "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinity);
        }
        let p: f64 = t.parse().map_err(|_| MeansError::Exponent(f64::NAN))?;
        Exponent::new(p)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinity => write!(f, "inf"),
            Exponent::Finite(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanParams {
    pub p: Exponent,
    /// Number of circle samples; `None` picks a size from the series.
    pub quad_points: Option<usize>,
}

impl MeanParams {
    pub fn new(p: Exponent) -> Self {
        MeanParams { p, quad_points: None }
    }

    pub fn with_points(p: Exponent, m: usize) -> Self {
        MeanParams { p, quad_points: Some(m.max(1)) }
    }

    pub fn q(&self) -> Exponent {
        self.p.conjugate()
    }
}

/// A mean together with the difference between the `m`- and `2m`-point
/// rules (zero for the closed-form `p = 2`).
#[derive(Clone, Debug)]
pub struct MeanValue {
    pub value: Float,
    pub richardson_err: Float,
    pub points: usize,
}

/// Default sample count: at least [`MIN_QUAD_POINTS`] and eight points per
/// unit of bandwidth of the pruned series on the circle.
pub fn default_points(terms: &CircleTerms) -> usize {
    MIN_QUAD_POINTS.max((8 * terms.span()).next_power_of_two())
}

pub fn mean_p(f: &TruncatedSeries, r: &Float, mp: &MeanParams) -> MeanValue {
    let terms = f.circle_terms(r);
    mean_p_terms(&terms, f.precision(), mp)
}

/// [`mean_p`] for a series already rescaled to the unit circle.
pub fn mean_p_terms(terms: &CircleTerms, prec: u32, mp: &MeanParams) -> MeanValue {
    let m = mp.quad_points.unwrap_or_else(|| default_points(terms));
    match mp.p {
        Exponent::Finite(p) if p == 2.0 => MeanValue {
            value: parseval(terms, prec),
            richardson_err: Float::new(prec),
            points: 0,
        },
        Exponent::Finite(p) => {
            let samples = terms.values_on_roots(2 * m);
            let fine = power_mean(&samples, p, prec);
            let even: Vec<HighComplex> = samples.into_iter().step_by(2).collect();
            let coarse = power_mean(&even, p, prec);
            let err = Float::with_val(prec, &coarse - &fine).abs();
            MeanValue { value: coarse, richardson_err: err, points: m }
        }
        Exponent::Infinity => {
            let (value, sampled) = refined_max(terms, prec, m);
            let err = Float::with_val(prec, &value - &sampled).abs();
            MeanValue { value, richardson_err: err, points: m }
        }
    }
}

/// [`mean_p_terms`] with the circle samples taken in double precision
/// after normalizing by the largest term, so only relative accuracy near
/// `1e-13` is retained. Intended for sweeps over many radii; `p = 2` still
/// uses the exact Parseval sum.
pub fn mean_p_fast(terms: &CircleTerms, prec: u32, p: Exponent, quad_points: Option<usize>) -> Float {
    if terms.is_empty() {
        return Float::new(prec);
    }
    let m = quad_points.unwrap_or_else(|| default_points(terms)).max(1);
    let scaled = match p {
        Exponent::Finite(p) if p == 2.0 => return parseval(terms, prec),
        Exponent::Finite(p) => {
            let (moduli, shift) = terms.moduli_f64(m);
            let mean = if p == 1.0 {
                moduli.iter().sum::<f64>() / m as f64
            } else {
                (moduli.iter().map(|v| v.powf(p)).sum::<f64>() / m as f64).powf(1.0 / p)
            };
            (mean, shift)
        }
        Exponent::Infinity => {
            let (moduli, shift) = terms.moduli_f64(m);
            let (arg, best) = moduli
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (j, v)| if *v > acc.1 { (j, *v) } else { acc });
            let (norm, _) = terms.normalized_f64();
            let h = std::f64::consts::TAU / m as f64;
            let center = h * arg as f64;
            let top = golden_max(|t| modulus_at_angle_f64(&norm, t), center - h, center + h).max(best);
            (top, shift)
        }
    };
    Float::with_val(prec, scaled.0) << scaled.1 as i32
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - (hi - lo) * inv_phi;
    let mut x2 = lo + (hi - lo) * inv_phi;
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - (hi - lo) * inv_phi;
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + (hi - lo) * inv_phi;
            f2 = f(x2);
        }
    }
    f1.max(f2)
}

/// Trapezoid rule for `M_p` with exactly `m` points, no refinement.
pub fn mean_p_quadrature(f: &TruncatedSeries, r: &Float, p: f64, m: usize) -> Float {
    let samples = f.evaluate_circle(r, m.max(1));
    power_mean(&samples, p, f.precision())
}

/// `(sum |c_n|^2 r^{2n})^{1/2}`.
fn parseval(terms: &CircleTerms, prec: u32) -> Float {
    let mut s = Float::new(prec);
    for (_, c) in terms.terms() {
        s += c.norm_sqr();
    }
    s.sqrt()
}

fn power_mean(samples: &[HighComplex], p: f64, prec: u32) -> Float {
    if samples.is_empty() {
        return Float::new(prec);
    }
    let mut acc = Float::new(prec);
    if p == 1.0 {
        for v in samples {
            acc += v.abs();
        }
        return acc / samples.len() as u64;
    }
    let half_p = Float::with_val(prec, p) / 2u32;
    for v in samples {
        let n2 = v.norm_sqr();
        if !n2.is_zero() {
            acc += n2.pow(&half_p);
        }
    }
    acc /= samples.len() as u64;
    if acc.is_zero() {
        return acc;
    }
    acc.pow(Float::with_val(prec, p).recip())
}

/// Largest sampled modulus refined by golden-section search on the two
/// neighbouring sample intervals; returns `(refined, sampled)`.
fn refined_max(terms: &CircleTerms, prec: u32, m: usize) -> (Float, Float) {
    let samples = terms.values_on_roots(m);
    let mut best = Float::new(prec);
    let mut arg = 0usize;
    for (j, v) in samples.iter().enumerate() {
        let a = v.norm_sqr();
        if a > best {
            best = a;
            arg = j;
        }
    }
    let sampled = Float::with_val(prec, best.sqrt_ref());
    if terms.len() <= 1 || best.is_zero() {
        return (sampled.clone(), sampled);
    }
    let h = pi(prec) * 2u32 / m as u64;
    let center = Float::with_val(prec, &h * arg as u64);
    let modsq = |t: &Float| terms.value_at_angle(t).norm_sqr();
    let inv_phi = (Float::with_val(prec, 5).sqrt() - 1u32) / 2u32;
    let mut lo = Float::with_val(prec, &center - &h);
    let mut hi = Float::with_val(prec, &center + &h);
    let mut x1 = Float::with_val(prec, &hi - Float::with_val(prec, &hi - &lo) * &inv_phi);
    let mut x2 = Float::with_val(prec, &lo + Float::with_val(prec, &hi - &lo) * &inv_phi);
    let mut f1 = modsq(&x1);
    let mut f2 = modsq(&x2);
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = Float::with_val(prec, &hi - Float::with_val(prec, &hi - &lo) * &inv_phi);
            f1 = modsq(&x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = Float::with_val(prec, &lo + Float::with_val(prec, &hi - &lo) * &inv_phi);
            f2 = modsq(&x2);
        }
    }
    let top = best.max(&f1).max(&f2);
    (top.sqrt(), sampled)
}

#[derive(Clone, Debug)]
pub struct HausdorffYoung {
    /// `(sum |c_n r^n|^q)^{1/q}`.
    pub lhs: Float,
    /// `M_p(f, r)`.
    pub rhs: Float,
    /// `rhs - lhs`.
    pub margin: Float,
    /// Richardson discrepancy of `rhs`.
    pub quadrature_err: Float,
}

/// Compares the `l^q` norm of the Fourier coefficients `c_n r^n` of
/// `t -> f(r e^{it})` with `M_p(f, r)`.
pub fn hausdorff_young_check(
    f: &TruncatedSeries,
    r: &Float,
    mp: &MeanParams,
) -> Result<HausdorffYoung, MeansError> {
    let p = match mp.p {
        Exponent::Finite(p) if p > 1.0 && p <= 2.0 => p,
        other => return Err(MeansError::HausdorffYoungRange(other.to_string())),
    };
    if r.is_zero() || r.is_sign_negative() {
        return Err(MeansError::Radius(r.to_f64()));
    }
    let prec = f.precision();
    let terms = f.circle_terms(r);
    let q = Float::with_val(prec, p) / (Float::with_val(prec, p) - 1u32);
    let mut s = Float::new(prec);
    for (_, c) in terms.terms() {
        if p == 2.0 {
            s += c.norm_sqr();
        } else {
            s += c.abs().pow(&q);
        }
    }
    let lhs = if s.is_zero() { s } else { s.pow(q.recip()) };
    let rhs = mean_p_terms(&terms, prec, mp);
    let margin = Float::with_val(prec, &rhs.value - &lhs);
    Ok(HausdorffYoung {
        lhs,
        rhs: rhs.value,
        margin,
        quadrature_err: rhs.richardson_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::relative_error;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const P: u32 = 256;

    fn r(v: f64) -> Float {
        Float::with_val(P, v)
    }

    fn fin(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn conjugates() {
        assert_eq!(fin(2.0).conjugate(), fin(2.0));
        assert_eq!(fin(1.0).conjugate(), Exponent::Infinity);
        assert_eq!(Exponent::Infinity.conjugate(), fin(1.0));
        assert_eq!(fin(1.5).conjugate(), fin(3.0));
        assert!(Exponent::new(0.5).is_err());
        assert_eq!(Exponent::parse("inf").unwrap(), Exponent::Infinity);
    }

    #[test]
    fn monomial_means_are_radius_powers() {
        let f = TruncatedSeries::monomial(5, &HighComplex::from_f64(P, 0.0, 1.0), 16, P).unwrap();
        for p in [fin(1.0), fin(1.5), fin(2.0), fin(4.0), Exponent::Infinity] {
            let v = mean_p(&f, &r(1.3), &MeanParams::with_points(p, 64)).value;
            let want = Float::with_val(P, r(1.3).pow(5u32));
            assert!(relative_error(&v, &want) < 1e-60, "p = {p}");
        }
    }

    #[test]
    fn parseval_and_exponential() {
        let f = TruncatedSeries::from_f64(&[(1.0, 0.0), (1.0, 0.0)], 4, P).unwrap();
        let v = mean_p(&f, &r(1.0), &MeanParams::new(fin(2.0))).value;
        assert!(relative_error(&v, &r(2.0).sqrt()) < 1e-70);
        let q = mean_p_quadrature(&f, &r(1.0), 2.0, 64);
        assert!(relative_error(&q, &v) < 1e-70);

        let e = TruncatedSeries::exp_truncated(80, 80, P).unwrap();
        let m = mean_p(&e, &r(3.0), &MeanParams::new(Exponent::Infinity)).value;
        let e3 = r(3.0).exp();
        assert!(Float::with_val(P, &m - &e3).abs() < e3 * 1e-3);
    }

    #[test]
    fn hausdorff_young_examples() {
        let f = TruncatedSeries::from_f64(&[(1.0, 0.0), (1.0, 0.0)], 4, P).unwrap();
        let hy = hausdorff_young_check(&f, &r(1.0), &MeanParams::new(fin(1.5))).unwrap();
        let cube_root_two = r(2.0).cbrt();
        assert!(relative_error(&hy.lhs, &cube_root_two) < 1e-60);
        // |1 + e^{it}| has a kink at t = pi, so only algebraic convergence.
        let dense = mean_p_quadrature(&f, &r(1.0), 1.5, 1 << 14);
        assert!(relative_error(&hy.rhs, &dense) < 1e-8);
        assert!(hy.margin > 0);

        let g = TruncatedSeries::monomial(3, &HighComplex::from_f64(P, 2.0, 0.0), 8, P).unwrap();
        let hy = hausdorff_young_check(&g, &r(0.5), &MeanParams::new(fin(1.25))).unwrap();
        assert!(relative_error(&hy.lhs, &hy.rhs) < 1e-60);

        assert!(hausdorff_young_check(&f, &r(1.0), &MeanParams::new(fin(1.0))).is_err());
        assert!(hausdorff_young_check(&f, &r(1.0), &MeanParams::new(fin(3.0))).is_err());
    }

    #[test]
    fn fast_means_agree_with_full_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = TruncatedSeries::random_polynomial(&mut rng, 40, 64, P).unwrap();
        for rad in [0.3, 1.0, 7.0] {
            let terms = f.circle_terms(&r(rad));
            for p in [fin(1.0), fin(1.5), fin(2.0), fin(4.0), Exponent::Infinity] {
                let mp = MeanParams::with_points(p, 512);
                let full = mean_p_terms(&terms, P, &mp).value;
                let fast = mean_p_fast(&terms, P, p, Some(512));
                assert!(relative_error(&full, &fast) < 1e-10, "p = {p}, r = {rad}");
            }
        }
        let e = TruncatedSeries::exp_truncated(200, 256, P).unwrap();
        let big = mean_p_fast(&e.circle_terms(&r(300.0)), P, Exponent::Infinity, None);
        let want = e.evaluate(&HighComplex::from_f64(P, 300.0, 0.0)).re;
        assert!(relative_error(&big, &want) < 1e-10);
    }

    #[test]
    fn means_increase_with_p_and_r() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let ps = [fin(1.0), fin(1.5), fin(2.0), fin(4.0), Exponent::Infinity];
        for _ in 0..3 {
            let f = TruncatedSeries::random_polynomial(&mut rng, 10, 16, P).unwrap();
            let mut prev_r: Option<Float> = None;
            for rad in [0.25, 0.5, 1.0, 2.0] {
                let vals: Vec<Float> = ps
                    .iter()
                    .map(|&p| mean_p(&f, &r(rad), &MeanParams::with_points(p, 256)).value)
                    .collect();
                for pair in vals.windows(2) {
                    assert!(pair[0] <= Float::with_val(P, &pair[1] * (1.0 + 1e-12)));
                }
                if let Some(prev) = prev_r {
                    assert!(prev <= vals[0]);
                }
                prev_r = Some(vals[0].clone());
            }
        }
    }
}
