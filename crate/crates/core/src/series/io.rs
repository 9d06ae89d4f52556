use std::io::{BufRead, Write};

use rug::Float;

use super::{SeriesError, TruncatedSeries};
use crate::numeric::{format_exact, HighComplex, MIN_PRECISION};

pub const SERIES_MAGIC: &str = "dunklseries v1";

/// A series together with the `alpha` it was produced for.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesFile {
    pub alpha: Float,
    pub series: TruncatedSeries,
}

/// Writes every coefficient `c_0..c_N`, zeros included, so the truncation
/// degree survives the round trip.
pub fn write_series<W: Write>(out: &mut W, alpha: &Float, f: &TruncatedSeries) -> std::io::Result<()> {
    writeln!(out, "{SERIES_MAGIC}")?;
    writeln!(out, "alpha={}", format_exact(alpha))?;
    writeln!(out, "precision_bits={}", f.precision())?;
    writeln!(out, "n_coeffs={}", f.trunc_degree() + 1)?;
    for (n, c) in f.coeffs().iter().enumerate() {
        writeln!(out, "{n} {} {}", format_exact(&c.re), format_exact(&c.im))?;
    }
    Ok(())
}

/// Reads a series file. Coefficient lines may be omitted (missing indices
/// are zero) but must be in range and appear at most once.
pub fn read_series<R: BufRead>(input: R) -> Result<SeriesFile, SeriesError> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| -> Result<(usize, String), SeriesError> {
        match lines.next() {
            Some((i, Ok(l))) => Ok((i, l.trim().to_string())),
            Some((_, Err(e))) => Err(e.into()),
            None => Err(SeriesError::Format { line: 0, message: format!("missing {what}") }),
        }
    };
    let (i, magic) = next("header")?;
    if magic != SERIES_MAGIC {
        return Err(fmt_err(i, format!("expected `{SERIES_MAGIC}`, found `{magic}`")));
    }
    let (i, l) = next("alpha")?;
    let alpha_text = field(i, &l, "alpha")?;
    let (i, l) = next("precision_bits")?;
    let prec: u32 = field(i, &l, "precision_bits")?
        .parse()
        .map_err(|e| fmt_err(i, format!("precision_bits: {e}")))?;
    if prec < MIN_PRECISION {
        return Err(fmt_err(i, format!("precision_bits must be at least {MIN_PRECISION}")));
    }
    let alpha = parse_float(i, &alpha_text, prec)?;
    let (i, l) = next("n_coeffs")?;
    let n_coeffs: usize = field(i, &l, "n_coeffs")?
        .parse()
        .map_err(|e| fmt_err(i, format!("n_coeffs: {e}")))?;
    if n_coeffs == 0 {
        return Err(fmt_err(i, "n_coeffs must be positive".into()));
    }

    let mut coeffs = vec![HighComplex::zero(prec); n_coeffs];
    let mut seen = vec![false; n_coeffs];
    for (i, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(fmt_err(i, "expected `<n> <re> <im>`".into()));
        }
        let n: usize = parts[0].parse().map_err(|e| fmt_err(i, format!("index: {e}")))?;
        if n >= n_coeffs {
            return Err(fmt_err(i, format!("index {n} out of range 0..{n_coeffs}")));
        }
        if std::mem::replace(&mut seen[n], true) {
            return Err(fmt_err(i, format!("duplicate index {n}")));
        }
        coeffs[n] = HighComplex::from_parts(parse_float(i, parts[1], prec)?, parse_float(i, parts[2], prec)?);
    }
    Ok(SeriesFile {
        alpha,
        series: TruncatedSeries::from_coeffs(coeffs, prec)?,
    })
}

fn field(line: usize, text: &str, key: &str) -> Result<String, SeriesError> {
    match text.split_once('=') {
        Some((k, v)) if k.trim() == key => Ok(v.trim().to_string()),
        _ => Err(fmt_err(line, format!("expected `{key}=<value>`"))),
    }
}

fn parse_float(line: usize, text: &str, prec: u32) -> Result<Float, SeriesError> {
    Float::parse(text)
        .map(|p| Float::with_val(prec, p))
        .map_err(|e| fmt_err(line, format!("bad number `{text}`: {e}")))
}

fn fmt_err(line: usize, message: String) -> SeriesError {
    SeriesError::Format { line, message }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = TruncatedSeries::random_polynomial(&mut rng, 30, 40, 256).unwrap();
        let f = f.scale(&HighComplex::from_parts(
            Float::with_val(256, 1) / 3u32,
            Float::with_val(256, 1e-200),
        ));
        let alpha = Float::with_val(256, 0.3);
        let mut buf = Vec::new();
        write_series(&mut buf, &alpha, &f).unwrap();
        let back = read_series(buf.as_slice()).unwrap();
        assert_eq!(back.alpha, alpha);
        assert_eq!(back.series, f);
    }

    #[test]
    fn sparse_files_are_accepted() {
        let text = "dunklseries v1\nalpha=0\nprecision_bits=128\nn_coeffs=4\n2 1 0\n";
        let back = read_series(text.as_bytes()).unwrap();
        assert_eq!(back.series.trunc_degree(), 3);
        assert_eq!(back.series.degree(), 2);
    }

    #[test]
    fn malformed_files_report_the_line() {
        let bad = "dunklseries v1\nalpha=0\nprecision_bits=128\nn_coeffs=2\n5 1 0\n";
        match read_series(bad.as_bytes()) {
            Err(SeriesError::Format { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(read_series("nope\n".as_bytes()).is_err());
        let dup = "dunklseries v1\nalpha=0\nprecision_bits=128\nn_coeffs=2\n1 1 0\n1 2 0\n";
        assert!(read_series(dup.as_bytes()).is_err());
    }
}
