use std::cmp::Ordering;
use std::fmt;

use rug::Float;

/// Signed real stored as `sign * exp(log_mag)`.
///
/// Used for the super-exponentially growing weights and their reciprocals:
/// products become sums of `log_mag`, so nothing overflows even when the
/// magnitude itself would not fit any float exponent range.
#[derive(Clone, Debug, PartialEq)]
pub struct LogScaled {
    sign: i8,
    log_mag: Float,
}

impl LogScaled {
    pub fn zero(prec: u32) -> Self {
        LogScaled {
            sign: 0,
            log_mag: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        LogScaled {
            sign: 1,
            log_mag: Float::new(prec),
        }
    }

    /// Builds `sign * exp(log_mag)`. A zero `sign` yields the zero value.
    pub fn from_log(sign: i8, log_mag: Float) -> Self {
        let sign = sign.signum();
        if sign == 0 {
            return LogScaled::zero(log_mag.prec());
        }
        LogScaled { sign, log_mag }
    }

    pub fn from_real(x: &Float) -> Self {
        let prec = x.prec();
        if x.is_zero() {
            return LogScaled::zero(prec);
        }
        let sign = if x.is_sign_negative() { -1 } else { 1 };
        LogScaled {
            sign,
            log_mag: Float::with_val(prec, x.abs_ref()).ln(),
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Natural log of the magnitude; meaningless when the value is zero.
    pub fn log_mag(&self) -> &Float {
        &self.log_mag
    }

    pub fn prec(&self) -> u32 {
        self.log_mag.prec()
    }

    /// Converts back to an ordinary float at `prec` bits.
    pub fn to_real(&self, prec: u32) -> Float {
        if self.sign == 0 {
            return Float::new(prec);
        }
        let v = Float::with_val(prec, self.log_mag.exp_ref());
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }

    pub fn mul(&self, other: &LogScaled) -> LogScaled {
        if self.sign == 0 || other.sign == 0 {
            return LogScaled::zero(self.prec());
        }
        LogScaled {
            sign: self.sign * other.sign,
            log_mag: Float::with_val(self.prec(), &self.log_mag + &other.log_mag),
        }
    }

    /// Quotient; division by zero yields zero rather than an infinity, which
    /// matches the `d_n = 0 for n < 0` convention used by the callers.
    pub fn div(&self, other: &LogScaled) -> LogScaled {
        if self.sign == 0 || other.sign == 0 {
            return LogScaled::zero(self.prec());
        }
        LogScaled {
            sign: self.sign * other.sign,
            log_mag: Float::with_val(self.prec(), &self.log_mag - &other.log_mag),
        }
    }

    pub fn neg(&self) -> LogScaled {
        LogScaled {
            sign: -self.sign,
            log_mag: self.log_mag.clone(),
        }
    }

    pub fn abs(&self) -> LogScaled {
        LogScaled {
            sign: self.sign.abs(),
            log_mag: self.log_mag.clone(),
        }
    }

    /// `|self|^q` for `q > 0`.
    pub fn pow_abs(&self, q: &Float) -> LogScaled {
        if self.sign == 0 {
            return LogScaled::zero(self.prec());
        }
        LogScaled {
            sign: 1,
            log_mag: Float::with_val(self.prec(), &self.log_mag * q),
        }
    }

    /// Orders by absolute value; zero is the smallest.
    pub fn cmp_abs(&self, other: &LogScaled) -> Ordering {
        match (self.sign == 0, other.sign == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => self
                .log_mag
                .partial_cmp(&other.log_mag)
                .unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for LogScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({})", if s < 0 { "-" } else { "" }, self.log_mag.to_f64()),
        }
    }
}

/// Sums log-scaled terms by shifting out the largest log-magnitude before
/// exponentiating. Terms more than `prec + 64` bits below the largest cannot
/// affect the rounded result and are skipped. An empty input (or exact
/// cancellation) gives the zero value.
pub fn log_scaled_sum(terms: &[LogScaled]) -> LogScaled {
    let Some(prec) = terms.iter().map(LogScaled::prec).max() else {
        return LogScaled::zero(super::DEFAULT_PRECISION);
    };
    let Some(max_log) = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| &t.log_mag)
        .max_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
        .cloned()
    else {
        return LogScaled::zero(prec);
    };
    let wp = prec + 64;
    let cutoff = -((wp + 16) as f64) * std::f64::consts::LN_2;
    let mut acc = Float::new(wp);
    let mut shifted = Float::new(wp);
    for t in terms.iter().filter(|t| !t.is_zero()) {
        use rug::Assign;
        shifted.assign(&t.log_mag - &max_log);
        if shifted < cutoff {
            continue;
        }
        shifted.exp_mut();
        if t.sign < 0 {
            acc -= &shifted;
        } else {
            acc += &shifted;
        }
    }
    if acc.is_zero() {
        return LogScaled::zero(prec);
    }
    let sign = if acc.is_sign_negative() { -1 } else { 1 };
    let log_mag = Float::with_val(prec, acc.abs().ln() + &max_log);
    LogScaled { sign, log_mag }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;
    use rug::Rational;

    const P: u32 = 256;

    fn ln(v: f64) -> Float {
        Float::with_val(P, v).ln()
    }

    #[test]
    fn two_ones_make_two() {
        let s = log_scaled_sum(&[LogScaled::from_log(1, ln(1.0)), LogScaled::from_log(1, ln(1.0))]);
        assert_eq!(s.sign(), 1);
        assert!(Float::with_val(P, s.log_mag() - ln(2.0)).abs() < 1e-70);
    }

    #[test]
    fn opposite_signs_cancel_exactly() {
        let x = LogScaled::from_log(1, ln(7.25));
        let s = log_scaled_sum(&[x.clone(), x.neg()]);
        assert_eq!(s.sign(), 0);
        assert_eq!(log_scaled_sum(&[]).sign(), 0);
    }

    #[test]
    fn widely_separated_magnitudes() {
        let ten = ln(10.0);
        let big = LogScaled::from_log(1, Float::with_val(P, &ten * 400));
        let small = LogScaled::from_log(1, Float::with_val(P, &ten * -400));
        let s = log_scaled_sum(&[big.clone(), small]);
        assert_eq!(s.sign(), 1);
        // 10^-800 relative contribution is far below 2^-256.
        assert_eq!(s.log_mag(), big.log_mag());
    }

    #[test]
    fn matches_rational_oracle_at_small_exponents() {
        // Same shape as the 10^400 / 10^-400 case, scaled down so exact
        // rational arithmetic can act as the reference.
        let exps = [12i32, -12, 3, -7];
        let signs = [1i8, 1, -1, 1];
        let mut exact = Rational::new();
        let mut terms = Vec::new();
        for (&e, &s) in exps.iter().zip(&signs) {
            let v = if e >= 0 {
                Rational::from(rug::Integer::from(10).pow(e as u32))
            } else {
                Rational::from((1, rug::Integer::from(10).pow((-e) as u32)))
            };
            if s < 0 {
                exact -= &v;
            } else {
                exact += &v;
            }
            terms.push(LogScaled::from_log(s, Float::with_val(P, &ln(10.0) * e)));
        }
        let got = log_scaled_sum(&terms).to_real(P);
        let want = Float::with_val(P, &exact);
        let rel = Float::with_val(P, &got - &want).abs() / &want;
        assert!(rel < Float::with_val(P, 1) >> 240u32);
    }

    #[test]
    fn products_add_logs() {
        let a = LogScaled::from_real(&Float::with_val(P, -3));
        let b = LogScaled::from_real(&Float::with_val(P, 0.5));
        let c = a.mul(&b);
        assert_eq!(c.sign(), -1);
        assert!(Float::with_val(P, c.to_real(P) + 1.5).abs() < 1e-70);
        assert_eq!(a.div(&LogScaled::zero(P)).sign(), 0);
        assert_eq!(a.cmp_abs(&b), Ordering::Greater);
    }
}
