//! A fixed enumeration of polynomials with Gaussian-rational coefficients.
//!
//! Height of a rational `a/b` in lowest terms is `max(|a|, b)` (zero has
//! height 0); a Gaussian rational has the larger height of its two parts;
//! a nonzero polynomial has height `max(deg + 1, max coefficient height)`
//! and the zero polynomial height 0. There are finitely many polynomials of
//! each height with degree at most `dmax`, and they are listed level by
//! level:
//!
//! - rationals in the order `0`, then for `H = 1, 2, ...`: `H/1`, `H/b`
//!   for `b = 2..H-1` coprime to `H`, `a/H` for `a = 1..H-1` coprime to
//!   `H`, each value followed by its negative;
//! - the scalars `C_h` of height at most `h` ordered by
//!   `(height, index of imaginary part, index of real part)`;
//! - level `h` lists the coefficient vectors `(c_0, .., c_{L-1})` over `C_h`
//!   with `L = min(h, dmax + 1)` in mixed-radix order, `c_0` varying
//!   fastest, keeping only those of height exactly `h`.
//!
//! Index 1 is the zero polynomial, 2 and 3 are the constants `1` and `-1`.

use std::fmt;
use std::sync::Mutex;

use rug::{Float, Integer, Rational};

use crate::numeric::HighComplex;
use crate::series::{SeriesError, TruncatedSeries};

/// Default degree cap for enumerated targets.
pub const DEFAULT_DMAX: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRational {
    pub fn zero() -> Self {
        GaussRational { re: Rational::new(), im: Rational::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn height(&self) -> u64 {
        rational_height(&self.re).max(rational_height(&self.im))
    }

    pub fn to_complex(&self, prec: u32) -> HighComplex {
        HighComplex::from_parts(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }

    pub fn abs_f64(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re == 0, self.im == 0) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im < 0 {
                    write!(f, "{}-{}i", self.re, Rational::from(-&self.im))
                } else {
                    write!(f, "{}+{}i", self.re, self.im)
                }
            }
        }
    }
}

pub fn rational_height(x: &Rational) -> u64 {
    if *x == 0 {
        return 0;
    }
    let n = Integer::from(x.numer().abs_ref());
    let d = x.denom();
    n.max(d.clone()).to_u64().unwrap_or(u64::MAX)
}

/// Polynomial `sum_t coeffs[t] z^t` with trailing zeros removed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TargetPoly {
    coeffs: Vec<GaussRational>,
}

impl TargetPoly {
    pub fn new(mut coeffs: Vec<GaussRational>) -> Self {
        while coeffs.last().is_some_and(GaussRational::is_zero) {
            coeffs.pop();
        }
        TargetPoly { coeffs }
    }

    pub fn zero() -> Self {
        TargetPoly { coeffs: Vec::new() }
    }

    /// Constant polynomial with an integer real value.
    pub fn constant(c: i64) -> Self {
        TargetPoly::new(vec![GaussRational { re: Rational::from(c), im: Rational::new() }])
    }

    pub fn coeffs(&self) -> &[GaussRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn height(&self) -> u64 {
        if self.is_zero() {
            return 0;
        }
        let h = self.coeffs.iter().map(GaussRational::height).max().unwrap_or(0);
        h.max(self.coeffs.len() as u64)
    }

    pub fn to_complex(&self, prec: u32) -> Vec<HighComplex> {
        self.coeffs.iter().map(|c| c.to_complex(prec)).collect()
    }

    pub fn to_series(&self, trunc_degree: usize, prec: u32) -> Result<TruncatedSeries, SeriesError> {
        let mut s = TruncatedSeries::zero(trunc_degree, prec);
        for (t, c) in self.coeffs.iter().enumerate() {
            s.set_coeff(t, c.to_complex(prec))?;
        }
        Ok(s)
    }

    /// `sum_t |b_t|` in double precision.
    pub fn l1_f64(&self) -> f64 {
        self.coeffs.iter().map(GaussRational::abs_f64).sum()
    }
}

impl fmt::Display for TargetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (t, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match t {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{t}")?,
            }
        }
        Ok(())
    }
}

/// Rationals of height exactly `h` in enumeration order.
fn rationals_of_height(h: u64) -> Vec<Rational> {
    if h == 0 {
        return vec![Rational::new()];
    }
    let coprime = |a: u64, b: u64| Integer::from(a).gcd(&Integer::from(b)) == 1;
    let mut positive = vec![Rational::from(h)];
    for b in 2..h {
        if coprime(h, b) {
            positive.push(Rational::from((h, b)));
        }
    }
    for a in 1..h {
        if coprime(a, h) {
            positive.push(Rational::from((a, h)));
        }
    }
    positive
        .into_iter()
        .flat_map(|x| {
            let neg = Rational::from(-&x);
            [x, neg]
        })
        .collect()
}

#[derive(Debug, Default)]
struct Cache {
    /// Polynomials found so far, `found[i]` has index `i + 1`.
    found: Vec<TargetPoly>,
    /// Level currently being scanned and the mixed-radix counter inside it.
    level: u64,
    scalars: Vec<GaussRational>,
    counter: Vec<usize>,
    exhausted_level: bool,
}

/// The enumeration, with the listed prefix cached.
#[derive(Debug)]
pub struct TargetEnumeration {
    dmax: usize,
    cache: Mutex<Cache>,
}

impl TargetEnumeration {
    pub fn new(dmax: usize) -> Self {
        TargetEnumeration {
            dmax,
            cache: Mutex::new(Cache {
                found: vec![TargetPoly::zero()],
                level: 0,
                exhausted_level: true,
                ..Cache::default()
            }),
        }
    }

    pub fn dmax(&self) -> usize {
        self.dmax
    }

    /// Number of coefficient vectors scanned at level `h`:
    /// `|C_h|^{min(h, dmax + 1)}`, saturating.
    pub fn level_size(&self, h: u64) -> u128 {
        if h == 0 {
            return 1;
        }
        let c = scalars_up_to(h).len() as u128;
        let len = h.min(self.dmax as u64 + 1) as u32;
        let mut n: u128 = 1;
        for _ in 0..len {
            n = n.saturating_mul(c);
        }
        n
    }

    /// Polynomial with the given 1-based index.
    pub fn target(&self, index: usize) -> TargetPoly {
        assert!(index >= 1, "target indices start at 1");
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        while cache.found.len() < index {
            self.advance(&mut cache);
        }
        cache.found[index - 1].clone()
    }

    /// Index of `poly`, scanning at most up to `limit`.
    pub fn index_of(&self, poly: &TargetPoly, limit: usize) -> Option<usize> {
        (1..=limit).find(|&i| self.target(i) == *poly)
    }

    fn advance(&self, cache: &mut Cache) {
        loop {
            if cache.exhausted_level {
                cache.level += 1;
                cache.scalars = scalars_up_to(cache.level);
                let len = cache.level.min(self.dmax as u64 + 1) as usize;
                cache.counter = vec![0; len];
                cache.exhausted_level = false;
            } else if !increment(&mut cache.counter, cache.scalars.len()) {
                cache.exhausted_level = true;
                continue;
            }
            let poly = TargetPoly::new(cache.counter.iter().map(|&i| cache.scalars[i].clone()).collect());
            if poly.height() == cache.level {
                cache.found.push(poly);
                return;
            }
        }
    }
}

/// Mixed-radix increment with the first digit fastest; false on wrap.
fn increment(counter: &mut [usize], radix: usize) -> bool {
    for d in counter.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

fn scalars_up_to(h: u64) -> Vec<GaussRational> {
    let mut order: Vec<Rational> = Vec::new();
    let mut heights: Vec<u64> = Vec::new();
    for k in 0..=h {
        for x in rationals_of_height(k) {
            order.push(x);
            heights.push(k);
        }
    }
    let mut out = Vec::new();
    for level in 0..=h {
        for (i_im, im) in order.iter().enumerate() {
            for (i_re, re) in order.iter().enumerate() {
                if heights[i_im].max(heights[i_re]) == level {
                    out.push(GaussRational { re: re.clone(), im: im.clone() });
                }
            }
        }
    }
    out
}
