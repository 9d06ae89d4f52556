use rug::Float;

/// Decimal string that parses back to exactly the same float at the same
/// precision.
pub fn format_exact(x: &Float) -> String {
    if x.is_zero() {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    format_digits(x, None)
}

/// Decimal rounded to `digits` significant digits with trailing zeros
/// removed. Moderate exponents use positional notation, the rest use
/// `d.ddd e±x` scientific notation.
pub fn format_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    format_digits(x, Some(digits.max(1)))
}

fn format_digits(x: &Float, digits: Option<usize>) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf".into() } else { "inf".into() };
    }
    // value = 0.DIGITS * 10^exp
    let (neg, mantissa, exp) = x.to_sign_string_exp(10, digits);
    let exp = exp.unwrap_or(0);
    let trimmed = mantissa.trim_end_matches('0');
    let trimmed = if trimmed.is_empty() { "0" } else { trimmed };
    let sign = if neg { "-" } else { "" };
    let point = exp; // digits before the decimal point
    if (-5..=30).contains(&point) {
        let body = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), trimmed)
        } else if (point as usize) >= trimmed.len() {
            format!("{}{}", trimmed, "0".repeat(point as usize - trimmed.len()))
        } else {
            let (a, b) = trimmed.split_at(point as usize);
            format!("{a}.{b}")
        };
        format!("{sign}{body}")
    } else {
        let (first, rest) = trimmed.split_at(1);
        let e = point - 1;
        if rest.is_empty() {
            format!("{sign}{first}e{e}")
        } else {
            format!("{sign}{first}.{rest}e{e}")
        }
    }
}
