use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::{Float, Integer, Rational};

use super::NumericError;

/// Guard bits carried through the Stirling evaluation.
const GUARD_BITS: u32 = 64;

/// `ln Gamma(x)` for `x > 0`.
///
/// The argument is shifted upward to at least `(prec + 64) / 4` through the
/// recurrence `Gamma(x + 1) = x Gamma(x)`, the Stirling series is summed
/// there until its terms drop below the working precision, and the shift is
/// undone with a single logarithm of the accumulated product. The result is
/// rounded to the precision of `x`.
pub fn log_gamma(x: &Float) -> Result<Float, NumericError> {
    if x.is_nan() || *x <= 0 {
        return Err(NumericError::Domain(x.to_string_radix(10, Some(20))));
    }
    let prec = x.prec();
    let wp = prec + GUARD_BITS;
    let cutoff = f64::from(wp / 4).max(16.0);

    let mut y = Float::with_val(wp, x);
    let mut shift = Float::with_val(wp, 1);
    let mut shifted = false;
    while y < cutoff {
        shift *= &y;
        y += 1u32;
        shifted = true;
    }
    let mut out = stirling(&y, wp);
    if shifted {
        out -= shift.ln();
    }
    Ok(Float::with_val(prec, out))
}

/// Stirling series for `ln Gamma(y)`, `y` large.
fn stirling(y: &Float, wp: u32) -> Float {
    let ln_y = Float::with_val(wp, y.ln_ref());
    let mut base = Float::with_val(wp, y - 0.5f64) * &ln_y;
    base -= y;
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    base += two_pi.ln() / 2u32;

    let eps = Float::with_val(wp, 1) >> (wp + 8);
    let tol = Float::with_val(wp, base.abs_ref()).max(&Float::with_val(wp, 1)) * &eps;

    let inv_y2 = Float::with_val(wp, y.square_ref()).recip();
    let mut power = Float::with_val(wp, y.recip_ref());
    let mut sum = Float::new(wp);
    let mut k = 0usize;
    let mut coeffs = stirling_coefficients(wp, 64);
    loop {
        if k >= coeffs.len() {
            coeffs = stirling_coefficients(wp, 2 * coeffs.len());
        }
        let term = Float::with_val(wp, &coeffs[k] * &power);
        let small = Float::with_val(wp, term.abs_ref()) < tol;
        sum += &term;
        if small {
            break;
        }
        power *= &inv_y2;
        k += 1;
    }
    base + sum
}

/// `B_{2k} / (2k (2k - 1))` for `k = 1..=count`, as floats at `wp` bits.
fn stirling_coefficients(wp: u32, count: usize) -> Arc<Vec<Float>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Float>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(v) = map.get(&wp) {
        if v.len() >= count {
            return Arc::clone(v);
        }
    }
    let target = count.max(64).next_power_of_two();
    let bern = even_bernoulli(target);
    let coeffs: Vec<Float> = bern
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let k = (i + 1) as u64;
            let denom = Integer::from(2 * k) * Integer::from(2 * k - 1);
            Float::with_val(wp, &Rational::from(b / denom))
        })
        .collect();
    let arc = Arc::new(coeffs);
    map.insert(wp, Arc::clone(&arc));
    arc
}

/// Even-index Bernoulli numbers `B_2, B_4, ..., B_{2 count}` from the
/// recurrence `sum_{j=0}^{m} C(m+1, j) B_j = 0`.
fn even_bernoulli(count: usize) -> Vec<Rational> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
    let mut all = cache.lock().unwrap_or_else(|e| e.into_inner());
    // `all` holds B_0..B_n (all indices).
    let needed = 2 * count + 1;
    if all.is_empty() {
        all.push(Rational::from(1));
    }
    while all.len() < needed {
        let m = all.len();
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (j, b) in all.iter().enumerate() {
            // binom = C(m + 1, j)
            if j > 0 {
                binom *= (m + 1 - j + 1) as u64;
                binom /= j as u64;
            }
            if *b.numer() != 0 {
                acc += Rational::from(b * &binom);
            }
        }
        all.push(-acc / Integer::from(m + 1));
    }
    (1..=count).map(|k| all[2 * k].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn lg(v: f64) -> Float {
        log_gamma(&Float::with_val(P, v)).unwrap()
    }

    fn close(a: &Float, b: &Float, bits: i32) -> bool {
        let d = Float::with_val(P, a - b).abs();
        let scale = Float::with_val(P, b.abs_ref()).max(&Float::with_val(P, 1));
        d <= scale * (Float::with_val(P, 1) << bits) >> P
    }

    #[test]
    fn bernoulli_numbers() {
        let b = even_bernoulli(4);
        assert_eq!(b[0], Rational::from((1, 6)));
        assert_eq!(b[1], Rational::from((-1, 30)));
        assert_eq!(b[2], Rational::from((1, 42)));
        assert_eq!(b[3], Rational::from((-1, 30)));
    }

    #[test]
    fn factorial_values() {
        assert!(lg(1.0).abs() < (Float::with_val(P, 1) >> (P - 16)));
        assert!(lg(2.0).abs() < (Float::with_val(P, 1) >> (P - 16)));
        assert!(close(&lg(5.0), &Float::with_val(P, 24).ln(), 16));
        let half = Float::with_val(P, Constant::Pi).ln() / 2u32;
        assert!(close(&lg(0.5), &half, 16));
    }

    #[test]
    fn agrees_with_mpfr_lngamma() {
        for &v in &[1e-6, 0.1, 0.75, 3.3, 17.0, 120.5, 4096.25, 1.0e7] {
            let x = Float::with_val(P, v);
            let ours = log_gamma(&x).unwrap();
            let reference = x.clone().ln_gamma();
            assert!(close(&ours, &reference, 16), "x = {v}: {ours} vs {reference}");
        }
    }

    #[test]
    fn rejects_non_positive() {
        assert!(log_gamma(&Float::with_val(P, 0)).is_err());
        assert!(log_gamma(&Float::with_val(P, -2.5)).is_err());
        assert!(log_gamma(&Float::with_val(P, f64::NAN)).is_err());
    }
}
