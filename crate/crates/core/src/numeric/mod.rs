//! Configurable-precision arithmetic.
//!
//! Reals are MPFR floats (`rug::Float`) rounded to nearest; every value
//! carries its own precision and operations produce results at the precision
//! of their left operand. Complex values are pairs of such floats.

mod complex;
mod format;
mod gamma;
mod log_scaled;

pub use complex::HighComplex;
pub use format::{format_decimal, format_exact};
pub use gamma::log_gamma;
pub use log_scaled::{log_scaled_sum, LogScaled};

use rug::float::Constant;
use rug::Float;
use thiserror::Error;

/// Real number carried at a configurable number of mantissa bits.
pub type HighReal = Float;

/// Default mantissa width in bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// Smallest precision accepted anywhere in the toolkit.
pub const MIN_PRECISION: u32 = 64;

/// Environment variable that overrides [`DEFAULT_PRECISION`].
pub const PRECISION_ENV: &str = "DUNKL_PRECISION_BITS";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error("log_gamma is only defined for positive arguments, got {0}")]
    Domain(String),
    #[error("precision must be at least {MIN_PRECISION} bits, got {0}")]
    Precision(u32),
    #[error("cannot parse `{0}` as a decimal number")]
    Parse(String),
}

/// Precision used when the caller does not specify one.
///
/// Reads [`PRECISION_ENV`] if set and valid, otherwise [`DEFAULT_PRECISION`].
pub fn default_precision() -> u32 {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<u32>().ok())
        .filter(|&p| p >= MIN_PRECISION)
        .unwrap_or(DEFAULT_PRECISION)
}

pub fn check_precision(prec: u32) -> Result<u32, NumericError> {
    if prec < MIN_PRECISION {
        Err(NumericError::Precision(prec))
    } else {
        Ok(prec)
    }
}

/// Parses a decimal string into a float at `prec` bits (round to nearest).
pub fn parse_real(s: &str, prec: u32) -> Result<Float, NumericError> {
    let t = s.trim();
    Float::parse(t)
        .map(|p| Float::with_val(prec, p))
        .map_err(|_| NumericError::Parse(t.to_string()))
}

pub fn real(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// Cheap estimate of `log2 |x|`, `-inf` for zero. Never overflows, even for
/// values far outside the `f64` range.
pub fn log2_abs_approx(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    if !x.is_finite() {
        return f64::INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log2() + e as f64
}

/// Natural log of `x` as an `f64`, valid for any finite nonzero magnitude.
pub fn ln_abs_approx(x: &Float) -> f64 {
    log2_abs_approx(x) * std::f64::consts::LN_2
}

/// `2^e` at `prec` bits.
pub fn pow2(prec: u32, e: i32) -> Float {
    Float::with_val(prec, 1) << e
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_error(a: &Float, b: &Float) -> Float {
    let prec = a.prec().max(b.prec());
    let scale = Float::with_val(prec, a.abs_ref()).max(&Float::with_val(prec, b.abs_ref()));
    if scale.is_zero() {
        return Float::new(prec);
    }
    let diff = Float::with_val(prec, a - b).abs();
    diff / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_estimate_survives_huge_exponents() {
        let x = Float::with_val(128, 1) << 100_000;
        assert!((log2_abs_approx(&x) - 100_000.0).abs() < 1e-9);
        assert_eq!(log2_abs_approx(&Float::new(64)), f64::NEG_INFINITY);
        let y = Float::with_val(128, -0.75);
        assert!((log2_abs_approx(&y) - 0.75f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_real("1.5e3", 128).is_ok());
        assert!(matches!(parse_real("abc", 128), Err(NumericError::Parse(_))));
    }

    #[test]
    fn precision_floor() {
        assert!(check_precision(63).is_err());
        assert_eq!(check_precision(64), Ok(64));
    }
}
