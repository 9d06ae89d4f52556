//! The weights `d_n(alpha)`, the Dunkl operator acting on coefficients, its
//! right inverse, and general weighted backward shifts.
//!
//! On monomials the operator acts as `z^n -> (d_n / d_{n-1}) z^{n-1}`, so on
//! coefficients it is the weighted backward shift with ratios
//! `a_n = d_n / d_{n-1}`, which are `n` for even `n` and `n + 2 alpha + 1`
//! for odd `n`. Powers of it annihilate `z^n` only when the power strictly
//! exceeds `n`: `z^n` itself is sent to the nonzero constant `d_n`.

use rug::{Assign, Float};
use thiserror::Error;

use crate::numeric::{log_gamma, HighComplex, LogScaled, NumericError};
use crate::series::{CircleTerms, SeriesError, TruncatedSeries};

/// Extra bits carried by the log-weight table.
const TABLE_GUARD_BITS: u32 = 32;

/// Smallest admissible distance of `alpha` above `-1/2`.
pub const ALPHA_MARGIN: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum DunklError {
    #[error("alpha must exceed -1/2 + {ALPHA_MARGIN:e}, got {0}")]
    Alpha(String),
    #[error("weight a_{0} is zero")]
    ZeroWeight(usize),
    #[error("a weighted shift needs at least one weight")]
    NoWeights,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// Ratio `a_n = d_n / d_{n-1}` for `n >= 1` at the precision of `alpha`.
pub fn ratio_weight(alpha: &Float, n: usize) -> Float {
    let prec = alpha.prec();
    if n % 2 == 0 {
        Float::with_val(prec, n as u64)
    } else {
        let mut a = Float::with_val(prec, alpha * 2u32);
        a += (n + 1) as u64;
        a
    }
}

/// `ln d_n(alpha)` from the Gamma-function closed form
/// `d_n = 2^n [n/2]! Gamma([(n+1)/2] + alpha + 1) / Gamma(alpha + 1)`.
///
/// Accepts any `alpha > -1/2` and returns a value at the precision of
/// `alpha`; the Gamma values are computed with 32 extra bits.
pub fn log_weight_closed_form(alpha: &Float, n: usize) -> Result<Float, NumericError> {
    let prec = alpha.prec();
    let wp = prec + TABLE_GUARD_BITS;
    let a = Float::with_val(wp, alpha);
    let mut out = Float::with_val(wp, n as u64) * Float::with_val(wp, 2).ln();
    out += log_gamma(&Float::with_val(wp, (n / 2 + 1) as u64))?;
    out += log_gamma(&Float::with_val(wp, &a + ((n + 1) / 2 + 1) as u64))?;
    out -= log_gamma(&Float::with_val(wp, &a + 1u32))?;
    Ok(Float::with_val(prec, out))
}

/// `ln d_n(alpha)` as the running sum of `ln a_k`, `k = 1..=n`, carried
/// with 32 extra bits. Accepts any `alpha > -1/2`.
pub fn log_weight_recurrence(alpha: &Float, n: usize) -> Float {
    let prec = alpha.prec();
    let wp = prec + TABLE_GUARD_BITS;
    let a = Float::with_val(wp, alpha);
    let mut sum = Float::new(wp);
    for k in 1..=n {
        sum += ratio_weight(&a, k).ln();
    }
    Float::with_val(prec, sum)
}

/// `alpha` together with the table `ln d_0 .. ln d_N` and the ratios `a_n`.
#[derive(Clone, Debug)]
pub struct DunklWeights {
    alpha: Float,
    prec: u32,
    log_d: Vec<Float>,
    log_d_f64: Vec<f64>,
    ratios: Vec<Float>,
}

impl DunklWeights {
    /// Tabulates the weights for `n <= trunc_degree`. The table itself is
    /// kept with 32 extra bits.
    pub fn new(alpha: &Float, trunc_degree: usize, prec: u32) -> Result<Self, DunklError> {
        let bound = Float::with_val(prec.max(alpha.prec()), -0.5) + ALPHA_MARGIN;
        if alpha.is_nan() || *alpha <= bound {
            return Err(DunklError::Alpha(alpha.to_string_radix(10, Some(20))));
        }
        let wp = prec + TABLE_GUARD_BITS;
        let alpha_wp = Float::with_val(wp, alpha);
        let mut log_d = Vec::with_capacity(trunc_degree + 1);
        let mut ratios = Vec::with_capacity(trunc_degree + 1);
        let mut acc = Float::new(wp);
        log_d.push(acc.clone());
        ratios.push(Float::with_val(prec, 1));
        for n in 1..=trunc_degree {
            let a = ratio_weight(&alpha_wp, n);
            acc += Float::with_val(wp, a.ln_ref());
            log_d.push(acc.clone());
            ratios.push(Float::with_val(prec, a));
        }
        let log_d_f64 = log_d.iter().map(Float::to_f64).collect();
        Ok(DunklWeights {
            alpha: Float::with_val(prec, alpha),
            prec,
            log_d,
            log_d_f64,
            ratios,
        })
    }

    pub fn from_f64(alpha: f64, trunc_degree: usize, prec: u32) -> Result<Self, DunklError> {
        DunklWeights::new(&Float::with_val(prec, alpha), trunc_degree, prec)
    }

    pub fn alpha(&self) -> &Float {
        &self.alpha
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Largest tabulated index.
    pub fn trunc_degree(&self) -> usize {
        self.log_d.len() - 1
    }

    /// `a_n` for `1 <= n <= N` (and `1` at `n = 0`).
    pub fn ratio(&self, n: usize) -> Float {
        match self.ratios.get(n) {
            Some(a) => a.clone(),
            None => ratio_weight(&self.alpha, n),
        }
    }

    /// `ln d_n` at the table precision; beyond the table the closed form is
    /// used instead.
    pub fn log_d(&self, n: usize) -> Float {
        match self.log_d.get(n) {
            Some(v) => v.clone(),
            None => {
                let a = Float::with_val(self.prec + TABLE_GUARD_BITS, &self.alpha);
                log_weight_closed_form(&a, n).expect("alpha > -1/2 keeps Gamma arguments positive")
            }
        }
    }

    fn log_d_ref(&self, n: usize) -> std::borrow::Cow<'_, Float> {
        match self.log_d.get(n) {
            Some(v) => std::borrow::Cow::Borrowed(v),
            None => std::borrow::Cow::Owned(self.log_d(n)),
        }
    }

    /// `ln d_n` as an `f64`, for cheap screening.
    pub fn log_d_f64(&self, n: usize) -> f64 {
        match self.log_d_f64.get(n) {
            Some(v) => *v,
            None => self.log_d(n).to_f64(),
        }
    }

    /// `d_n(alpha)`, with the zero value for negative `n`.
    pub fn weight(&self, n: i64) -> LogScaled {
        if n < 0 {
            return LogScaled::zero(self.prec + TABLE_GUARD_BITS);
        }
        LogScaled::from_log(1, self.log_d(n as usize))
    }

    /// `d_n` as a float at the working precision.
    pub fn d(&self, n: usize) -> Float {
        Float::with_val(self.prec, self.log_d_ref(n).exp_ref())
    }

    /// `d_n / d_m` at the working precision.
    pub fn quotient(&self, n: usize, m: usize) -> Float {
        let diff = Float::with_val(self.prec + TABLE_GUARD_BITS, &*self.log_d_ref(n) - &*self.log_d_ref(m));
        Float::with_val(self.prec, diff.exp_ref())
    }

    /// `ln d_n` from the closed form, at the working precision.
    pub fn log_d_closed_form(&self, n: usize) -> Float {
        log_weight_closed_form(&self.alpha, n).expect("alpha > -1/2 keeps Gamma arguments positive")
    }
}

/// `Lambda^k f`: coefficient `c_n` becomes `c_{n+k} d_{n+k} / d_n`; the top
/// `k` coefficients become zero.
pub fn apply_dunkl(f: &TruncatedSeries, w: &DunklWeights, k: usize) -> TruncatedSeries {
    let prec = f.precision();
    let mut out = TruncatedSeries::zero(f.trunc_degree(), prec);
    for (n, c) in f.nonzero_terms() {
        if n < k {
            continue;
        }
        let q = Float::with_val(prec, w.quotient(n, n - k));
        out.set_coeff(n - k, c.scale(&q)).expect("index below truncation");
    }
    out
}

/// `f -> f' + (2 alpha + 1) (f(z) - f(-z)) / (2z)` written out on
/// coefficients: `c'_n = (n + 1) c_{n+1} + (2 alpha + 1) c_{n+1} [n + 1 odd]`.
/// Shares nothing with [`apply_dunkl`] beyond `alpha`.
pub fn apply_dunkl_direct(f: &TruncatedSeries, w: &DunklWeights) -> TruncatedSeries {
    let prec = f.precision();
    let n_max = f.trunc_degree();
    let mut out = TruncatedSeries::zero(n_max, prec);
    let odd_extra = Float::with_val(prec, w.alpha() * 2u32) + 1u32;
    for n in 0..n_max {
        let c = &f.coeffs()[n + 1];
        if c.is_zero() {
            continue;
        }
        let mut factor = Float::with_val(prec, (n + 1) as u64);
        if (n + 1) % 2 == 1 {
            factor += &odd_extra;
        }
        out.set_coeff(n, c.scale(&factor)).expect("index below truncation");
    }
    out
}

/// `S^n f`: coefficient `c_k` moves to index `k + n` scaled by
/// `d_k / d_{k+n}`, so that `Lambda^n S^n f = f`.
pub fn right_inverse(f: &TruncatedSeries, w: &DunklWeights, n: usize) -> Result<TruncatedSeries, DunklError> {
    let prec = f.precision();
    let trunc = f.trunc_degree();
    let deg = f.degree();
    if deg >= 0 && deg as usize + n > trunc {
        return Err(SeriesError::Overflow { needed: deg as usize + n, trunc_degree: trunc }.into());
    }
    let mut out = TruncatedSeries::zero(trunc, prec);
    for (k, c) in f.nonzero_terms() {
        let q = w.quotient(k, k + n);
        out.set_coeff(k + n, c.scale(&q))?;
    }
    Ok(out)
}

/// Nonzero coefficients of a series with `f64` estimates of `ln |c_n|`,
/// reused across many powers of the operator.
#[derive(Clone, Debug)]
pub struct ScreenedSeries {
    prec: u32,
    terms: Vec<(usize, f64, HighComplex)>,
}

impl ScreenedSeries {
    pub fn new(f: &TruncatedSeries) -> Self {
        let terms = f
            .nonzero_terms()
            .map(|(n, c)| (n, c.log2_abs_approx() * std::f64::consts::LN_2, c.clone()))
            .collect();
        ScreenedSeries { prec: f.precision(), terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Lambda^k f` rescaled to the circle `|z| = r` and stripped of terms
    /// that cannot affect any sample, with `extra` appended before pruning.
    ///
    /// Each term's size is first estimated in `f64`; only the survivors are
    /// formed at full precision, so the cost is governed by the handful of
    /// coefficients near the bottom of the image rather than by the length
    /// of `f`.
    pub fn image_on_circle(
        &self,
        w: &DunklWeights,
        k: usize,
        r: &Float,
        extra: &[(usize, HighComplex)],
    ) -> CircleTerms {
        let prec = self.prec;
        let ln_r = if r.is_zero() { f64::NEG_INFINITY } else { crate::numeric::ln_abs_approx(r) };
        let start = self.terms.partition_point(|t| t.0 < k);
        let mut est: Vec<(usize, f64)> = Vec::new();
        let mut top = f64::NEG_INFINITY;
        for (i, (n, lc, _)) in self.terms.iter().enumerate().skip(start) {
            let m = n - k;
            let l = if m == 0 {
                lc + w.log_d_f64(*n)
            } else {
                lc + w.log_d_f64(*n) - w.log_d_f64(m) + m as f64 * ln_r
            };
            if l.is_finite() || l == f64::INFINITY {
                top = top.max(l);
                est.push((i, l));
            }
        }
        // Extra terms are already on the unit circle.
        let extra_logs: Vec<f64> = extra
            .iter()
            .map(|(m, c)| {
                let base = c.log2_abs_approx() * std::f64::consts::LN_2;
                if *m == 0 { base } else { base + *m as f64 * ln_r }
            })
            .collect();
        for l in &extra_logs {
            top = top.max(*l);
        }
        let floor = top - (f64::from(prec) + 40.0) * std::f64::consts::LN_2;

        let mut merged: Vec<(usize, HighComplex)> = Vec::new();
        let mut rpow_cache: Option<(usize, Float)> = None;
        let mut r_pow = |m: usize| -> Float {
            match &rpow_cache {
                Some((mm, v)) if *mm == m => v.clone(),
                _ => {
                    use rug::ops::Pow;
                    let v = Float::with_val(prec, r.pow(m as u32));
                    rpow_cache = Some((m, v.clone()));
                    v
                }
            }
        };
        for (i, l) in est {
            if l < floor {
                continue;
            }
            let (n, _, c) = &self.terms[i];
            let m = n - k;
            let mut q = Float::with_val(prec + TABLE_GUARD_BITS, &*w.log_d_ref(*n) - &*w.log_d_ref(m));
            q.exp_mut();
            let mut s = Float::with_val(prec, q);
            if m > 0 {
                s *= r_pow(m);
            }
            merged.push((m, c.scale(&s)));
        }
        for ((m, c), l) in extra.iter().zip(extra_logs) {
            if l < floor {
                continue;
            }
            let s = if *m == 0 { c.with_prec(prec) } else { c.with_prec(prec).scale(&r_pow(*m)) };
            merged.push((*m, s));
        }
        merged.sort_by_key(|t| t.0);
        let mut terms: Vec<(usize, HighComplex)> = Vec::with_capacity(merged.len());
        for (m, c) in merged {
            match terms.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += &c,
                _ => terms.push((m, c)),
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        CircleTerms::from_scaled(prec, terms)
    }
}

/// Weighted backward shift `c_n -> a_{n+1} c_{n+1}` with stored nonzero
/// weights `a_1 .. a_N`.
#[derive(Clone, Debug)]
pub struct WeightedShift {
    weights: Vec<HighComplex>,
    log_abs: Vec<Float>,
    cumlog: Vec<Float>,
}

impl WeightedShift {
    /// `weights[i]` is `a_{i+1}`.
    pub fn new(weights: Vec<HighComplex>) -> Result<Self, DunklError> {
        if weights.is_empty() {
            return Err(DunklError::NoWeights);
        }
        let prec = weights[0].prec();
        let mut log_abs = Vec::with_capacity(weights.len());
        let mut cumlog = Vec::with_capacity(weights.len() + 1);
        let mut acc = Float::new(prec + TABLE_GUARD_BITS);
        cumlog.push(acc.clone());
        for (i, a) in weights.iter().enumerate() {
            if a.is_zero() {
                return Err(DunklError::ZeroWeight(i + 1));
            }
            let l = Float::with_val(prec + TABLE_GUARD_BITS, a.with_prec(prec + TABLE_GUARD_BITS).abs().ln());
            acc += &l;
            log_abs.push(l);
            cumlog.push(acc.clone());
        }
        Ok(WeightedShift { weights, log_abs, cumlog })
    }

    /// `a_n = n`: the differentiation operator.
    pub fn differentiation(n_weights: usize, prec: u32) -> Result<Self, DunklError> {
        let w = (1..=n_weights)
            .map(|n| HighComplex::from_real(Float::with_val(prec, n as u64)))
            .collect();
        WeightedShift::new(w)
    }

    /// `a_n = d_n / d_{n-1}` for `n <= w.trunc_degree()`.
    pub fn dunkl(w: &DunklWeights) -> Result<Self, DunklError> {
        let a = (1..=w.trunc_degree())
            .map(|n| HighComplex::from_real(w.ratio(n)))
            .collect();
        WeightedShift::new(a)
    }

    /// `a_n = c` for every `n`.
    pub fn constant(c: &HighComplex, n_weights: usize) -> Result<Self, DunklError> {
        WeightedShift::new(vec![c.clone(); n_weights])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, n: usize) -> Option<&HighComplex> {
        n.checked_sub(1).and_then(|i| self.weights.get(i))
    }

    /// `ln |a_1 ... a_n|` for `0 <= n <= len`.
    pub fn log_product(&self, n: usize) -> &Float {
        &self.cumlog[n]
    }

    /// `max_n |a_n|^{1/n}` over the stored weights; finite on any stored
    /// range, which is the continuity condition on the whole sequence.
    pub fn continuity_bound(&self) -> Float {
        let mut best = Float::with_val(self.log_abs[0].prec(), f64::NEG_INFINITY);
        for (i, l) in self.log_abs.iter().enumerate() {
            let v = Float::with_val(l.prec(), l / (i + 1) as u64);
            if v > best {
                best = v;
            }
        }
        best.exp()
    }

    /// `c_n -> a_{n+1} c_{n+1}`; coefficients past the stored weights are
    /// an error.
    pub fn apply(&self, f: &TruncatedSeries) -> Result<TruncatedSeries, DunklError> {
        let prec = f.precision();
        let mut out = TruncatedSeries::zero(f.trunc_degree(), prec);
        let mut tmp = Float::new(prec);
        for (n, c) in f.nonzero_terms() {
            if n == 0 {
                continue;
            }
            let a = self.weight(n).ok_or(SeriesError::Overflow {
                needed: n,
                trunc_degree: self.len(),
            })?;
            let mut v = HighComplex::zero(prec);
            v.assign_mul(c, &a.with_prec(prec), &mut tmp);
            out.set_coeff(n - 1, v)?;
        }
        Ok(out)
    }
}

/// `g_n = |a_1 ... a_n|^{1/n}` for `n = 1..=N` and its running maximum.
#[derive(Clone, Debug)]
pub struct ShiftDiagnostic {
    pub g: Vec<Float>,
    pub running_max: Vec<Float>,
}

/// The horizon is clamped to the number of stored weights.
pub fn shift_hypercyclicity_diagnostic(s: &WeightedShift, horizon: usize) -> ShiftDiagnostic {
    let horizon = horizon.min(s.len());
    let mut g = Vec::with_capacity(horizon);
    let mut running_max: Vec<Float> = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        let l = s.log_product(n);
        let v = Float::with_val(l.prec(), l / n as u64).exp();
        let m = match running_max.last() {
            Some(prev) if *prev >= v => prev.clone(),
            _ => v.clone(),
        };
        g.push(v);
        running_max.push(m);
    }
    ShiftDiagnostic { g, running_max }
}

/// `mu(r) = max_{0 <= n <= N} r^n / |a_1 ... a_n|` and the smallest index
/// attaining it.
///
/// The log of each term is built incrementally from `ln r - ln |a_n|`, so a
/// step with `|a_n| = r` leaves the value bit-for-bit unchanged and exact
/// ties resolve to the smaller index.
pub fn critical_rate_mu(s: &WeightedShift, r: &Float) -> (LogScaled, usize) {
    let prec = s.cumlog[0].prec();
    if r.is_zero() {
        return (LogScaled::one(prec), 0);
    }
    let ln_r = Float::with_val(prec, r.ln_ref());
    let mut value = Float::new(prec);
    let mut best = value.clone();
    let mut best_n = 0usize;
    let mut step = Float::new(prec);
    for (i, l) in s.log_abs.iter().enumerate() {
        step.assign(&ln_r - l);
        value += &step;
        if value > best {
            best.assign(&value);
            best_n = i + 1;
        }
    }
    (LogScaled::from_log(1, best), best_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::relative_error;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const P: u32 = 256;

    fn w(alpha: f64, n: usize) -> DunklWeights {
        DunklWeights::from_f64(alpha, n, P).unwrap()
    }

    fn mono(k: usize, re: f64, n: usize) -> TruncatedSeries {
        TruncatedSeries::monomial(k, &HighComplex::from_f64(P, re, 0.0), n, P).unwrap()
    }

    fn assert_close(a: &TruncatedSeries, b: &TruncatedSeries, bits: i32) {
        let tol = Float::with_val(P, 1) >> (P as i32 - bits);
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            let d = (x - y).abs();
            let s = x.abs().max(&y.abs());
            assert!(d <= s * &tol, "{x} vs {y}");
        }
    }

    #[test]
    fn small_weights() {
        let w0 = w(0.0, 8);
        assert_eq!(w0.d(0), 1);
        assert!(relative_error(&w0.d(1), &Float::with_val(P, 2)) < 1e-70);
        assert!(w0.weight(-3).is_zero());
        let table: Vec<f64> = (0..=4).map(|n| w0.d(n).to_f64()).collect();
        assert_eq!(table, vec![1.0, 2.0, 4.0, 16.0, 64.0]);
        // At the differentiation limit the closed form gives n!.
        let limit = Float::with_val(P, -0.5) + Float::with_val(P, 1e-40);
        let d4 = log_weight_closed_form(&limit, 4).unwrap().exp();
        assert!(relative_error(&d4, &Float::with_val(P, 24)) < 1e-35);
    }

    #[test]
    fn rejects_alpha_at_the_boundary() {
        assert!(DunklWeights::from_f64(-0.5, 4, P).is_err());
        assert!(DunklWeights::from_f64(-0.6, 4, P).is_err());
        assert!(DunklWeights::from_f64(-0.5 + 1e-13, 4, P).is_err());
        assert!(DunklWeights::from_f64(-0.49, 4, P).is_ok());
    }

    #[test]
    fn ratios_match_the_gamma_form() {
        for &alpha in &[-0.49, 0.0, 1.0, 3.0] {
            let ww = w(alpha, 64);
            for n in 1..=64 {
                let from_closed = Float::with_val(P, ww.log_d_closed_form(n) - ww.log_d_closed_form(n - 1)).exp();
                assert!(relative_error(&from_closed, &ww.ratio(n)) < Float::with_val(P, 1) >> (P - 24));
            }
        }
    }

    #[test]
    fn operator_examples() {
        let ww = w(0.0, 8);
        assert_eq!(apply_dunkl(&mono(2, 1.0, 8), &ww, 1), mono(1, 2.0, 8));
        assert_eq!(apply_dunkl(&mono(3, 1.0, 8), &ww, 1), mono(2, 4.0, 8));
        assert!(apply_dunkl(&mono(3, 1.0, 8), &ww, 4).is_zero());
        // z^k is not annihilated by the k-th power.
        let c = apply_dunkl(&mono(3, 1.0, 8), &ww, 3);
        assert_eq!(c.degree(), 0);
        assert!(relative_error(&c.coeffs()[0].re, &ww.d(3)) < 1e-70);

        let quarter = w(0.25, 8);
        let out = apply_dunkl_direct(&mono(1, 1.0, 8), &quarter);
        assert_eq!(out, mono(0, 2.5, 8));
        assert_eq!(apply_dunkl_direct(&mono(2, 1.0, 8), &quarter), mono(1, 2.0, 8));
    }

    #[test]
    fn right_inverse_examples() {
        let ww = w(0.0, 8);
        let s1 = right_inverse(&mono(0, 1.0, 8), &ww, 1).unwrap();
        assert!((&s1.coeffs()[1] - &HighComplex::from_f64(P, 0.5, 0.0)).abs() < 1e-70);
        let s2 = right_inverse(&mono(0, 1.0, 8), &ww, 2).unwrap();
        assert!((&s2.coeffs()[2] - &HighComplex::from_f64(P, 0.25, 0.0)).abs() < 1e-70);
        assert!(right_inverse(&mono(5, 1.0, 8), &ww, 4).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = TruncatedSeries::random_polynomial(&mut rng, 20, 64, P).unwrap();
        let back = apply_dunkl(&right_inverse(&f, &ww, 30).unwrap(), &ww, 30);
        assert_close(&back, &f, 8);
    }

    #[test]
    fn direct_form_matches_log_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &alpha in &[-0.49, 0.0, 0.5, 1.0, 3.0] {
            let ww = w(alpha, 128);
            let f = TruncatedSeries::random_polynomial(&mut rng, 64, 128, P).unwrap();
            assert_close(&apply_dunkl(&f, &ww, 1), &apply_dunkl_direct(&f, &ww), 30);
        }
    }

    #[test]
    fn screened_image_matches_full_image() {
        let ww = w(0.5, 256);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = TruncatedSeries::random_polynomial(&mut rng, 200, 256, P).unwrap();
        let r = Float::with_val(P, 1.5);
        let k = 120;
        let sf = ScreenedSeries::new(&f);
        let extra = vec![(0usize, HighComplex::from_f64(P, -1.0, 0.0))];
        let screened = sf.image_on_circle(&ww, k, &r, &extra).values_on_roots(16);
        let mut full = apply_dunkl(&f, &ww, k);
        full.set_coeff(0, &full.coeffs()[0] - &extra[0].1).unwrap();
        let want = full.evaluate_circle(&r, 16);
        let scale = want.iter().map(|v| v.abs()).fold(Float::new(P), |a, b| a.max(&b));
        for (a, b) in screened.iter().zip(&want) {
            assert!((a - b).abs() / &scale < 1e-70);
        }
    }

    #[test]
    fn weighted_shift_presets() {
        let d = WeightedShift::differentiation(200, P).unwrap();
        let f = mono(3, 1.0, 8);
        assert_eq!(d.apply(&f).unwrap(), mono(2, 3.0, 8));

        let ones = WeightedShift::constant(&HighComplex::one(P), 50).unwrap();
        let diag = shift_hypercyclicity_diagnostic(&ones, 50);
        assert!(diag.g.iter().all(|g| *g == 1));

        let diag = shift_hypercyclicity_diagnostic(&d, 200);
        for pair in diag.g.windows(2) {
            assert!(pair[1] > pair[0]);
        }
        // (n!)^{1/n} ~ n/e.
        let g200 = diag.g[199].to_f64();
        assert!((g200 / (200.0 / std::f64::consts::E) - 1.0).abs() < 0.05);
        assert!(WeightedShift::new(vec![HighComplex::zero(P)]).is_err());
    }

    #[test]
    fn critical_rate_examples() {
        let d = WeightedShift::differentiation(100, P).unwrap();
        let (mu0, n0) = critical_rate_mu(&d, &Float::new(P));
        assert_eq!((mu0.to_real(P), n0), (Float::with_val(P, 1), 0));
        let (mu1, n1) = critical_rate_mu(&d, &Float::with_val(P, 1));
        assert_eq!(n1, 0);
        assert!(relative_error(&mu1.to_real(P), &Float::with_val(P, 1)) < 1e-70);

        // Brute force over n <= 100 in exact rationals.
        let mut best = rug::Rational::from(1);
        let mut term = rug::Rational::from(1);
        for n in 1..=100u32 {
            term = term * rug::Rational::from((10, n));
            if term > best {
                best = term.clone();
            }
        }
        let (mu10, n10) = critical_rate_mu(&d, &Float::with_val(P, 10));
        assert!(relative_error(&mu10.to_real(P), &Float::with_val(P, &best)) < 1e-70);
        assert_eq!(n10, 9, "10^9/9! and 10^10/10! tie; the smaller index wins");
    }
}
