//! Evaluation of a truncated series on a circle `|z| = r`.
//!
//! The series is first rescaled to the unit circle (`rho_n = c_n r^n`) and
//! terms that cannot influence any sample at the working precision are
//! dropped: every sample is bounded by the sum of the kept terms and the
//! maximum modulus on the circle is at least the largest single term
//! (Cauchy), so discarding terms `2^-(prec+32)` below the largest changes
//! every sample by far less than one ulp of the maximum modulus.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::ops::Pow;
use rug::{Assign, Float};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::numeric::{log2_abs_approx, pi, HighComplex};

/// Bits below the largest term at which a term is discarded.
const PRUNE_GUARD_BITS: f64 = 32.0;

/// `omega^j = exp(2 pi i j / m)` for `j = 0..m`, cached per `(m, prec)`.
pub fn roots_of_unity(m: usize, prec: u32) -> Arc<Vec<HighComplex>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<Vec<HighComplex>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&(m, prec)) {
        return Arc::clone(v);
    }
    let wp = prec + 16;
    let two_pi = pi(wp) * 2u32;
    let mut roots = Vec::with_capacity(m);
    for j in 0..m {
        // Exact values on the axes keep symmetric samples exactly symmetric.
        let root = if j == 0 {
            HighComplex::one(prec)
        } else if 4 * j == m {
            HighComplex::from_f64(prec, 0.0, 1.0)
        } else if 2 * j == m {
            HighComplex::from_f64(prec, -1.0, 0.0)
        } else if 4 * j == 3 * m {
            HighComplex::from_f64(prec, 0.0, -1.0)
        } else {
            let theta = Float::with_val(wp, &two_pi * j as u64) / m as u64;
            let (s, c) = theta.sin_cos(Float::new(wp));
            HighComplex::from_parts(Float::with_val(prec, c), Float::with_val(prec, s))
        };
        roots.push(root);
    }
    let arc = Arc::new(roots);
    cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert((m, prec), Arc::clone(&arc));
    arc
}

/// Nonzero terms of a series rescaled to the unit circle, negligible ones
/// removed. Indices are strictly increasing.
#[derive(Clone, Debug)]
pub struct CircleTerms {
    prec: u32,
    terms: Vec<(usize, HighComplex)>,
}

impl CircleTerms {
    /// Rescales `(n, c_n)` pairs by `r^n` and prunes. `r` must be `>= 0`.
    pub fn new<'a, I>(coeffs: I, r: &Float, prec: u32) -> Self
    where
        I: IntoIterator<Item = (usize, &'a HighComplex)>,
    {
        let nonzero: Vec<(usize, &HighComplex)> =
            coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if r.is_zero() {
            let terms = nonzero
                .into_iter()
                .filter(|(n, _)| *n == 0)
                .map(|(n, c)| (n, c.with_prec(prec)))
                .collect();
            return CircleTerms { prec, terms };
        }
        let log2_r = log2_abs_approx(r);
        let logs: Vec<f64> = nonzero
            .iter()
            .map(|(n, c)| c.log2_abs_approx() + *n as f64 * log2_r)
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let floor = top - (f64::from(prec) + PRUNE_GUARD_BITS);

        let mut terms = Vec::new();
        let mut power = Float::with_val(prec, 1);
        let mut power_index = 0usize;
        for ((n, c), l) in nonzero.into_iter().zip(logs) {
            if l < floor {
                continue;
            }
            if n > power_index {
                let step = Float::with_val(prec, r.pow((n - power_index) as u32));
                power *= step;
                power_index = n;
            }
            terms.push((n, c.with_prec(prec).scale(&power)));
        }
        CircleTerms { prec, terms }
    }

    /// Terms given directly on the unit circle (already rescaled).
    pub fn from_scaled(prec: u32, terms: Vec<(usize, HighComplex)>) -> Self {
        CircleTerms { prec, terms }
    }

    pub fn terms(&self) -> &[(usize, HighComplex)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// `high - low` of the kept indices, zero when empty.
    pub fn span(&self) -> usize {
        match (self.terms.first(), self.terms.last()) {
            (Some(a), Some(b)) => b.0 - a.0,
            _ => 0,
        }
    }

    /// Samples at the `m` points `r omega^j`.
    pub fn values_on_roots(&self, m: usize) -> Vec<HighComplex> {
        let prec = self.prec;
        if m == 0 {
            return Vec::new();
        }
        if self.terms.is_empty() {
            return vec![HighComplex::zero(prec); m];
        }
        let direct_cost = self.terms.len() as f64 * m as f64;
        let fft_cost = if m.is_power_of_two() && m >= 4 {
            let lg = m.trailing_zeros() as f64;
            1.5 * m as f64 * lg / 2.0 + m as f64
        } else {
            f64::INFINITY
        };
        let roots = roots_of_unity(m, prec);
        if fft_cost < direct_cost {
            self.values_fft(m, &roots)
        } else {
            self.values_direct(m, &roots)
        }
    }

    fn values_direct(&self, m: usize, roots: &[HighComplex]) -> Vec<HighComplex> {
        let prec = self.prec;
        let mut out = vec![HighComplex::zero(prec); m];
        let mut t1 = Float::new(prec);
        let mut t2 = Float::new(prec);
        for (n, rho) in &self.terms {
            let step = n % m;
            let mut idx = 0usize;
            for v in out.iter_mut() {
                v.add_mul(rho, &roots[idx], &mut t1, &mut t2);
                idx += step;
                if idx >= m {
                    idx -= m;
                }
            }
        }
        out
    }

    fn values_fft(&self, m: usize, roots: &[HighComplex]) -> Vec<HighComplex> {
        let prec = self.prec;
        let mut bins = vec![HighComplex::zero(prec); m];
        for (n, rho) in &self.terms {
            bins[n % m] += rho;
        }
        fft_in_place(&mut bins, roots);
        bins
    }

    /// Value at `r e^{i theta}`.
    pub fn value_at_angle(&self, theta: &Float) -> HighComplex {
        let prec = self.prec;
        if self.terms.is_empty() {
            return HighComplex::zero(prec);
        }
        let u = HighComplex::from_polar(&Float::with_val(prec, 1), theta);
        let mut tmp = Float::new(prec);
        let mut scratch = HighComplex::zero(prec);
        let mut iter = self.terms.iter().rev();
        let (mut prev, first) = iter.next().map(|(n, c)| (*n, c.clone())).unwrap();
        let mut acc = first;
        for (n, c) in iter {
            let gap = u.pow_u((prev - n) as u64);
            scratch.assign_mul(&acc, &gap, &mut tmp);
            std::mem::swap(&mut acc, &mut scratch);
            acc += c;
            prev = *n;
        }
        if prev > 0 {
            let lift = u.pow_u(prev as u64);
            scratch.assign_mul(&acc, &lift, &mut tmp);
            acc = scratch;
        }
        acc
    }
}

impl CircleTerms {
    /// The terms divided by `2^shift` and rounded to `f64`, where `shift`
    /// is the binary exponent of the largest term. Terms too small to be
    /// represented become zero.
    pub fn normalized_f64(&self) -> (Vec<(usize, Complex64)>, i64) {
        let top = self
            .terms
            .iter()
            .map(|(_, c)| c.log2_abs_approx())
            .fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return (Vec::new(), 0);
        }
        let shift = top.ceil() as i64;
        let terms = self
            .terms
            .iter()
            .map(|(n, c)| (*n, Complex64::new(scaled_f64(&c.re, shift), scaled_f64(&c.im, shift))))
            .collect();
        (terms, shift)
    }

    /// `|f|` at the `m` roots of unity in double precision, scaled by
    /// `2^-shift`; returns the moduli and `shift`.
    pub fn moduli_f64(&self, m: usize) -> (Vec<f64>, i64) {
        let (terms, shift) = self.normalized_f64();
        if m == 0 {
            return (Vec::new(), shift);
        }
        let mut bins = vec![Complex64::new(0.0, 0.0); m];
        for (n, c) in &terms {
            bins[n % m] += c;
        }
        // rustfft's inverse transform uses the positive exponent.
        FftPlanner::<f64>::new().plan_fft_inverse(m).process(&mut bins);
        (bins.iter().map(|v| v.norm()).collect(), shift)
    }
}

fn scaled_f64(x: &Float, shift: i64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let (m, e) = x.to_f64_exp();
    let e = e as i64 - shift;
    if e < -1100 {
        0.0
    } else {
        m * (e as f64).exp2()
    }
}

/// Modulus at angle `theta` of normalized `f64` terms.
pub fn modulus_at_angle_f64(terms: &[(usize, Complex64)], theta: f64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, c) in terms {
        let (s, co) = (*n as f64 * theta).sin_cos();
        acc += c * Complex64::new(co, s);
    }
    acc.norm()
}

/// In-place radix-2 transform `y_j = sum_b x_b omega^{b j}` with
/// `omega = exp(2 pi i / m)`; `roots` must be the table for `m`.
pub fn fft_in_place(x: &mut [HighComplex], roots: &[HighComplex]) {
    let m = x.len();
    assert!(m.is_power_of_two() && roots.len() == m);
    if m <= 1 {
        return;
    }
    let bits = m.trailing_zeros();
    for i in 0..m {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            x.swap(i, j);
        }
    }
    let prec = x[0].prec();
    let mut t = HighComplex::zero(prec);
    let mut tmp = Float::new(prec);
    let mut len = 2;
    while len <= m {
        let half = len / 2;
        let stride = m / len;
        for start in (0..m).step_by(len) {
            let (lo, hi) = x[start..start + len].split_at_mut(half);
            for k in 0..half {
                t.assign_mul(&roots[k * stride], &hi[k], &mut tmp);
                hi[k].re.assign(&lo[k].re - &t.re);
                hi[k].im.assign(&lo[k].im - &t.im);
                lo[k] += &t;
            }
        }
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::relative_error;

    const P: u32 = 192;

    fn c(re: f64, im: f64) -> HighComplex {
        HighComplex::from_f64(P, re, im)
    }

    fn naive(terms: &[(usize, HighComplex)], m: usize) -> Vec<HighComplex> {
        let roots = roots_of_unity(m, P);
        (0..m)
            .map(|j| {
                let mut acc = HighComplex::zero(P);
                for (n, rho) in terms {
                    acc += &(rho * &roots[(n * j) % m]);
                }
                acc
            })
            .collect()
    }

    #[test]
    fn fft_matches_direct_sum() {
        let terms: Vec<_> = (0..40)
            .map(|n| (n * 3 + 1, c((n as f64).sin(), 1.0 / (n as f64 + 1.0))))
            .collect();
        let ct = CircleTerms::from_scaled(P, terms.clone());
        let m = 64;
        let fft = ct.values_fft(m, &roots_of_unity(m, P));
        let want = naive(&terms, m);
        for (a, b) in fft.iter().zip(&want) {
            assert!((a - b).abs() < 1e-50);
        }
        let direct = ct.values_direct(m, &roots_of_unity(m, P));
        for (a, b) in direct.iter().zip(&want) {
            assert!((a - b).abs() < 1e-50);
        }
    }

    #[test]
    fn angle_evaluation_agrees_with_roots() {
        let terms = vec![(2usize, c(1.0, 0.5)), (5, c(-0.25, 2.0)), (9, c(0.0, 1.0))];
        let ct = CircleTerms::from_scaled(P, terms);
        let m = 16;
        let vals = ct.values_on_roots(m);
        let two_pi = pi(P) * 2u32;
        for (j, v) in vals.iter().enumerate() {
            let theta = Float::with_val(P, &two_pi * j as u32) / m as u32;
            assert!((&ct.value_at_angle(&theta) - v).abs() < 1e-50);
        }
    }

    #[test]
    fn double_precision_moduli_track_the_full_evaluation() {
        let terms: Vec<_> = (0..30)
            .map(|n| (n * 7, c((n as f64).cos() * 1e300, 1e299 / (n as f64 + 1.0))))
            .collect();
        let ct = CircleTerms::from_scaled(P, terms);
        for m in [16, 48, 64] {
            let (fast, shift) = ct.moduli_f64(m);
            let exact = ct.values_on_roots(m);
            for (a, b) in fast.iter().zip(&exact) {
                let want = b.abs();
                let got = Float::with_val(P, *a) << shift as i32;
                assert!(relative_error(&got, &want) < 1e-12);
            }
            let (norm, _) = ct.normalized_f64();
            let theta = 2.0 * std::f64::consts::PI * 5.0 / m as f64;
            assert!((modulus_at_angle_f64(&norm, theta) - fast[5]).abs() < 1e-12 * fast[5].max(1e-300));
        }
    }

    #[test]
    fn pruning_drops_only_negligible_terms() {
        let coeffs = vec![c(1.0, 0.0), c(1e-90, 0.0), c(0.0, 0.0), c(2.0, 0.0)];
        let ct = CircleTerms::new(coeffs.iter().enumerate(), &Float::with_val(P, 1), P);
        let kept: Vec<usize> = ct.terms().iter().map(|t| t.0).collect();
        assert_eq!(kept, vec![0, 3]);
        let at_zero = CircleTerms::new(coeffs.iter().enumerate(), &Float::new(P), P);
        assert_eq!(at_zero.len(), 1);
    }
}
