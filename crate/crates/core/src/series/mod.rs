//! Truncated Taylor series `sum_{n <= N} c_n z^n` of entire functions.

pub mod circle;
mod io;

pub use circle::{roots_of_unity, CircleTerms};
pub use io::{read_series, write_series, SeriesFile, SERIES_MAGIC};

use rand::Rng;
use rug::Float;
use thiserror::Error;

use crate::numeric::HighComplex;

/// Truncation degree used when none is configured.
pub const DEFAULT_TRUNC_DEGREE: usize = 4096;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("coefficient index {index} exceeds truncation degree {trunc_degree}")]
    IndexOutOfRange { index: usize, trunc_degree: usize },
    #[error("truncation degrees differ: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },
    #[error("series needs degree {needed} but is truncated at {trunc_degree}")]
    Overflow { needed: usize, trunc_degree: usize },
    #[error("a series needs at least one coefficient")]
    Empty,
    #[error("series file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coefficients `c_0..c_N` at a common precision; `N` is the truncation
/// degree and trailing coefficients may be zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries {
    prec: u32,
    coeffs: Vec<HighComplex>,
}

impl TruncatedSeries {
    pub fn zero(trunc_degree: usize, prec: u32) -> Self {
        TruncatedSeries {
            prec,
            coeffs: vec![HighComplex::zero(prec); trunc_degree + 1],
        }
    }

    /// `c z^k`.
    pub fn monomial(
        k: usize,
        c: &HighComplex,
        trunc_degree: usize,
        prec: u32,
    ) -> Result<Self, SeriesError> {
        let mut s = TruncatedSeries::zero(trunc_degree, prec);
        s.set_coeff(k, c.with_prec(prec))?;
        Ok(s)
    }

    /// Takes ownership of `coeffs`; the truncation degree is `len - 1` and
    /// every coefficient is rounded to `prec`.
    pub fn from_coeffs(coeffs: Vec<HighComplex>, prec: u32) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        let coeffs = coeffs
            .into_iter()
            .map(|c| if c.prec() == prec { c } else { c.with_prec(prec) })
            .collect();
        Ok(TruncatedSeries { prec, coeffs })
    }

    /// Polynomial with the given `(re, im)` coefficients, zero-padded.
    pub fn from_f64(
        coeffs: &[(f64, f64)],
        trunc_degree: usize,
        prec: u32,
    ) -> Result<Self, SeriesError> {
        let mut s = TruncatedSeries::zero(trunc_degree, prec);
        for (n, &(re, im)) in coeffs.iter().enumerate() {
            s.set_coeff(n, HighComplex::from_f64(prec, re, im))?;
        }
        Ok(s)
    }

    /// Taylor polynomial of `exp` with `c_n = 1/n!` for `n <= degree`.
    pub fn exp_truncated(degree: usize, trunc_degree: usize, prec: u32) -> Result<Self, SeriesError> {
        if degree > trunc_degree {
            return Err(SeriesError::Overflow { needed: degree, trunc_degree });
        }
        let mut s = TruncatedSeries::zero(trunc_degree, prec);
        let mut c = Float::with_val(prec, 1);
        for n in 0..=degree {
            if n > 0 {
                c /= n as u64;
            }
            s.coeffs[n] = HighComplex::from_real(c.clone());
        }
        Ok(s)
    }

    /// Random polynomial of exact degree `degree` with coefficients uniform
    /// in the square `[-1, 1]^2`.
    pub fn random_polynomial<R: Rng>(
        rng: &mut R,
        degree: usize,
        trunc_degree: usize,
        prec: u32,
    ) -> Result<Self, SeriesError> {
        if degree > trunc_degree {
            return Err(SeriesError::Overflow { needed: degree, trunc_degree });
        }
        let mut s = TruncatedSeries::zero(trunc_degree, prec);
        for n in 0..=degree {
            let mut c = HighComplex::zero(prec);
            while c.is_zero() {
                c = HighComplex::from_f64(prec, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            s.coeffs[n] = c;
        }
        Ok(s)
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn trunc_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[HighComplex] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&HighComplex> {
        self.coeffs.get(n)
    }

    pub fn set_coeff(&mut self, n: usize, c: HighComplex) -> Result<(), SeriesError> {
        let trunc_degree = self.trunc_degree();
        let slot = self
            .coeffs
            .get_mut(n)
            .ok_or(SeriesError::IndexOutOfRange { index: n, trunc_degree })?;
        *slot = if c.prec() == self.prec { c } else { c.with_prec(self.prec) };
        Ok(())
    }

    /// Largest index with a nonzero coefficient, `-1` for the zero series.
    pub fn degree(&self) -> i64 {
        self.coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .map_or(-1, |n| n as i64)
    }

    pub fn lowest_index(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(HighComplex::is_zero)
    }

    /// `(n, c_n)` for the nonzero coefficients in increasing order.
    pub fn nonzero_terms(&self) -> impl Iterator<Item = (usize, &HighComplex)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    /// Horner evaluation over the stored coefficients.
    pub fn evaluate(&self, z: &HighComplex) -> HighComplex {
        let prec = self.prec;
        let (Some(low), Some(high)) = (self.lowest_index(), self.degree().try_into().ok()) else {
            return HighComplex::zero(prec);
        };
        let high: usize = high;
        let z = z.with_prec(prec);
        let mut acc = self.coeffs[high].clone();
        let mut next = HighComplex::zero(prec);
        let mut tmp = Float::new(prec);
        for c in self.coeffs[low..high].iter().rev() {
            next.assign_mul(&acc, &z, &mut tmp);
            next += c;
            std::mem::swap(&mut acc, &mut next);
        }
        if low > 0 {
            acc = &acc * &z.pow_u(low as u64);
        }
        acc
    }

    /// Values `f(r e^{2 pi i j / m})` for `j = 0..m`.
    pub fn evaluate_circle(&self, r: &Float, m: usize) -> Vec<HighComplex> {
        self.circle_terms(r).values_on_roots(m)
    }

    /// Maximum of `|f|` over `m` equally spaced points of `|z| = r`, which
    /// by the maximum-modulus principle approximates the supremum over the
    /// closed disk.
    pub fn sup_on_disk(&self, r: &Float, m: usize) -> Float {
        max_modulus(&self.evaluate_circle(r, m.max(1)), self.prec)
    }

    pub fn circle_terms(&self, r: &Float) -> CircleTerms {
        CircleTerms::new(self.nonzero_terms(), r, self.prec)
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<Self, SeriesError> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(TruncatedSeries { prec: self.prec, coeffs })
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<Self, SeriesError> {
        self.check_same(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(TruncatedSeries { prec: self.prec, coeffs })
    }

    pub fn scale(&self, c: &HighComplex) -> Self {
        let c = c.with_prec(self.prec);
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| if a.is_zero() { a.clone() } else { a * &c })
            .collect();
        TruncatedSeries { prec: self.prec, coeffs }
    }

    fn check_same(&self, other: &TruncatedSeries) -> Result<(), SeriesError> {
        if self.trunc_degree() != other.trunc_degree() {
            return Err(SeriesError::TruncationMismatch {
                left: self.trunc_degree(),
                right: other.trunc_degree(),
            });
        }
        Ok(())
    }
}

/// Largest modulus among `values` (zero for an empty slice).
pub fn max_modulus(values: &[HighComplex], prec: u32) -> Float {
    let mut best = Float::new(prec);
    for v in values {
        let a = v.norm_sqr();
        if a > best {
            best = a;
        }
    }
    best.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::pi;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rug::ops::Pow;

    const P: u32 = 256;

    fn c(re: f64, im: f64) -> HighComplex {
        HighComplex::from_f64(P, re, im)
    }

    fn r(v: f64) -> Float {
        Float::with_val(P, v)
    }

    #[test]
    fn monomials() {
        let one = TruncatedSeries::monomial(0, &c(1.0, 0.0), 8, P).unwrap();
        assert_eq!(one.degree(), 0);
        let cube = TruncatedSeries::monomial(3, &c(2.0, 0.0), 8, P).unwrap();
        assert_eq!(cube.degree(), 3);
        assert_eq!(cube.coeff(3), Some(&c(2.0, 0.0)));
        assert!(matches!(
            TruncatedSeries::monomial(9, &c(1.0, 0.0), 8, P),
            Err(SeriesError::IndexOutOfRange { index: 9, trunc_degree: 8 })
        ));
        assert_eq!(TruncatedSeries::zero(8, P).degree(), -1);
    }

    #[test]
    fn point_evaluation() {
        let f = TruncatedSeries::from_f64(&[(1.0, 0.0), (1.0, 0.0)], 4, P).unwrap();
        assert_eq!(f.evaluate(&c(0.0, 1.0)), c(1.0, 1.0));
        let cube = TruncatedSeries::monomial(3, &c(1.0, 0.0), 4, P).unwrap();
        assert_eq!(cube.evaluate(&c(2.0, 0.0)), c(8.0, 0.0));
    }

    #[test]
    fn exponential_tail_bound() {
        // The omitted tail of the exponential series at z = 1 is below 2/65!.
        let f = TruncatedSeries::exp_truncated(64, 64, P).unwrap();
        let e = r(1.0).exp();
        let err = Float::with_val(P, &f.evaluate(&c(1.0, 0.0)).re - &e).abs();
        let bound = Float::with_val(P, 2) / Float::with_val(P, rug::Integer::from(rug::Integer::factorial(65)));
        assert!(err < bound);
    }

    #[test]
    fn circle_samples() {
        let z = TruncatedSeries::monomial(1, &c(1.0, 0.0), 4, P).unwrap();
        let v = z.evaluate_circle(&r(1.0), 4);
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (a, b) in v.iter().zip(&want) {
            assert!((a - b).abs() < 1e-70);
        }
        let one = TruncatedSeries::monomial(0, &c(1.0, 0.0), 4, P).unwrap();
        assert_eq!(one.evaluate_circle(&r(5.0), 3), vec![c(1.0, 0.0); 3]);
        let sq = TruncatedSeries::monomial(2, &c(1.0, 0.0), 4, P).unwrap();
        for v in sq.evaluate_circle(&r(2.0), 2) {
            assert!((&v - &c(4.0, 0.0)).abs() < 1e-70);
        }
    }

    #[test]
    fn add_scale_and_mismatch() {
        let z = TruncatedSeries::monomial(1, &c(1.0, 0.0), 4, P).unwrap();
        let two_z = TruncatedSeries::monomial(1, &c(2.0, 0.0), 4, P).unwrap();
        assert_eq!(z.add(&z).unwrap(), two_z);
        assert_eq!(z.scale(&c(2.0, 0.0)), two_z);
        let other = TruncatedSeries::zero(5, P);
        assert!(matches!(z.add(&other), Err(SeriesError::TruncationMismatch { .. })));
    }

    #[test]
    fn sup_of_monomial_is_radius_power() {
        let f = TruncatedSeries::monomial(7, &c(1.0, 0.0), 16, P).unwrap();
        for m in [1, 3, 16] {
            let s = f.sup_on_disk(&r(1.5), m);
            let want = Float::with_val(P, r(1.5).pow(7u32));
            assert!(Float::with_val(P, &s - &want).abs() < 1e-60);
        }
    }

    #[test]
    fn sampled_sup_of_exponential_against_dense_grid() {
        let f = TruncatedSeries::exp_truncated(60, 64, P).unwrap();
        let coarse = f.sup_on_disk(&r(1.0), 512);
        let dense = f.sup_on_disk(&r(1.0), 1 << 16);
        let e = r(1.0).exp();
        assert!(Float::with_val(P, &coarse - &dense).abs() < 1e-3);
        assert!(Float::with_val(P, &dense - &e).abs() < 1e-3);
    }

    #[test]
    fn trig_polynomial_sampling_within_one_percent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let d = 12;
            let f = TruncatedSeries::random_polynomial(&mut rng, d, 16, P).unwrap();
            let coarse = f.sup_on_disk(&r(1.0), 32 * d);
            let dense = f.sup_on_disk(&r(1.0), 1 << 16);
            let rel = Float::with_val(P, &dense - &coarse) / &dense;
            assert!(rel < 1e-2, "relative sampling gap {rel}");
        }
    }

    #[test]
    fn sparse_high_degree_evaluation_matches_horner() {
        let mut f = TruncatedSeries::zero(4096, P);
        f.set_coeff(3000, c(1.0, -1.0)).unwrap();
        f.set_coeff(3001, c(0.5, 0.0)).unwrap();
        let radius = r(1.001);
        let m = 8;
        let vals = f.evaluate_circle(&radius, m);
        let two_pi = pi(P) * 2u32;
        for (j, v) in vals.iter().enumerate() {
            let theta = Float::with_val(P, &two_pi * j as u32) / m as u32;
            let z = HighComplex::from_polar(&radius, &theta);
            let h = f.evaluate(&z);
            assert!((&h - v).abs() / h.abs() < 1e-60);
        }
    }

    proptest! {
        #[test]
        fn evaluation_is_additive(seed in 0u64..1000, re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = TruncatedSeries::random_polynomial(&mut rng, 20, 24, P).unwrap();
            let g = TruncatedSeries::random_polynomial(&mut rng, 24, 24, P).unwrap();
            let z = c(re, im);
            let lhs = f.add(&g).unwrap().evaluate(&z);
            let rhs = &f.evaluate(&z) + &g.evaluate(&z);
            let scale = rhs.abs() + 1u32;
            prop_assert!((&lhs - &rhs).abs() / scale < 1e-60);
        }
    }
}
