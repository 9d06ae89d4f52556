use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use rug::{Assign, Float};

use super::log2_abs_approx;

/// Complex number as a pair of MPFR floats sharing one precision.
#[derive(Clone, Debug, PartialEq)]
pub struct HighComplex {
    pub re: Float,
    pub im: Float,
}

impl HighComplex {
    pub fn zero(prec: u32) -> Self {
        HighComplex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        HighComplex {
            re: Float::with_val(prec, 1),
            im: Float::new(prec),
        }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        HighComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_real(x: Float) -> Self {
        let im = Float::new(x.prec());
        HighComplex { re: x, im }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        HighComplex { re, im }
    }

    /// `r * (cos theta + i sin theta)`.
    pub fn from_polar(r: &Float, theta: &Float) -> Self {
        let prec = r.prec();
        let (s, c) = Float::with_val(prec, theta).sin_cos(Float::new(prec));
        HighComplex {
            re: c * r,
            im: s * r,
        }
    }

    /// Converts to `prec` bits, rounding to nearest.
    pub fn with_prec(&self, prec: u32) -> Self {
        HighComplex {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> Float {
        let mut out = Float::with_val(self.prec(), self.re.square_ref());
        out += Float::with_val(self.prec(), self.im.square_ref());
        out
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn conj(&self) -> Self {
        HighComplex {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn scale(&self, x: &Float) -> Self {
        HighComplex {
            re: Float::with_val(self.prec(), &self.re * x),
            im: Float::with_val(self.prec(), &self.im * x),
        }
    }

    pub fn scale_assign(&mut self, x: &Float) {
        self.re *= x;
        self.im *= x;
    }

    /// Estimate of `log2 |z|` good to a few ulps of `f64`; `-inf` for zero.
    pub fn log2_abs_approx(&self) -> f64 {
        let a = log2_abs_approx(&self.re);
        let b = log2_abs_approx(&self.im);
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        if hi == f64::NEG_INFINITY {
            return hi;
        }
        hi + 0.5 * (1.0 + (2.0 * (lo - hi)).exp2()).log2()
    }

    /// `self = a * b` using `tmp` as scratch; avoids allocation in hot loops.
    pub fn assign_mul(&mut self, a: &HighComplex, b: &HighComplex, tmp: &mut Float) {
        self.re.assign(&a.re * &b.re);
        tmp.assign(&a.im * &b.im);
        self.re -= &*tmp;
        self.im.assign(&a.re * &b.im);
        tmp.assign(&a.im * &b.re);
        self.im += &*tmp;
    }

    /// `self += a * b` using two scratch floats.
    pub fn add_mul(&mut self, a: &HighComplex, b: &HighComplex, t1: &mut Float, t2: &mut Float) {
        t1.assign(&a.re * &b.re);
        t2.assign(&a.im * &b.im);
        *t1 -= &*t2;
        self.re += &*t1;
        t1.assign(&a.re * &b.im);
        t2.assign(&a.im * &b.re);
        *t1 += &*t2;
        self.im += &*t1;
    }

    /// Integer power by repeated squaring.
    pub fn pow_u(&self, mut n: u64) -> Self {
        let prec = self.prec();
        let mut result = HighComplex::one(prec);
        let mut base = self.clone();
        let mut tmp = Float::new(prec);
        let mut scratch = HighComplex::zero(prec);
        while n > 0 {
            if n & 1 == 1 {
                scratch.assign_mul(&result, &base, &mut tmp);
                std::mem::swap(&mut result, &mut scratch);
            }
            n >>= 1;
            if n > 0 {
                scratch.assign_mul(&base, &base, &mut tmp);
                std::mem::swap(&mut base, &mut scratch);
            }
        }
        result
    }
}

impl fmt::Display for HighComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &HighComplex {
    type Output = HighComplex;
    fn add(self, o: &HighComplex) -> HighComplex {
        let p = self.prec();
        HighComplex {
            re: Float::with_val(p, &self.re + &o.re),
            im: Float::with_val(p, &self.im + &o.im),
        }
    }
}

impl Sub for &HighComplex {
    type Output = HighComplex;
    fn sub(self, o: &HighComplex) -> HighComplex {
        let p = self.prec();
        HighComplex {
            re: Float::with_val(p, &self.re - &o.re),
            im: Float::with_val(p, &self.im - &o.im),
        }
    }
}

impl Mul for &HighComplex {
    type Output = HighComplex;
    fn mul(self, o: &HighComplex) -> HighComplex {
        let p = self.prec();
        let mut out = HighComplex::zero(p);
        let mut tmp = Float::new(p);
        out.assign_mul(self, o, &mut tmp);
        out
    }
}

impl Neg for &HighComplex {
    type Output = HighComplex;
    fn neg(self) -> HighComplex {
        let p = self.prec();
        HighComplex {
            re: Float::with_val(p, -&self.re),
            im: Float::with_val(p, -&self.im),
        }
    }
}

impl AddAssign<&HighComplex> for HighComplex {
    fn add_assign(&mut self, o: &HighComplex) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&HighComplex> for HighComplex {
    fn sub_assign(&mut self, o: &HighComplex) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}
