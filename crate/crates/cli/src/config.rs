use std::fmt;
use std::path::{Path, PathBuf};

use dunkl_core::growth::RateEnvelope;
use dunkl_core::means::Exponent;
use dunkl_core::numeric::{default_precision, parse_real, MIN_PRECISION};
use rug::Float;

use crate::CliError;

/// Settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    alpha_text: String,
    /// Whether `alpha` came from a flag or a config file.
    pub alpha_explicit: bool,
    pub p: Exponent,
    pub precision_bits: u32,
    pub trunc_degree: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub r_points: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub envelope: RateEnvelope,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            alpha_text: "0".into(),
            alpha_explicit: false,
            p: Exponent::Finite(2.0),
            precision_bits: default_precision(),
            trunc_degree: 4096,
            r_min: 0.01,
            r_max: 400.0,
            r_points: 256,
            seed: 0,
            output: None,
            envelope: RateEnvelope::LogGrowth,
        }
    }
}

impl ExperimentConfig {
    pub fn alpha(&self) -> Float {
        parse_real(&self.alpha_text, self.precision_bits).expect("alpha is validated when set")
    }

    pub fn alpha_text(&self) -> &str {
        &self.alpha_text
    }

    /// Sets one field from its textual value; `origin` names the source in
    /// error messages.
    pub fn set(&mut self, key: &str, value: &str, origin: &str) -> Result<(), CliError> {
        let v = value.trim();
        let bad = |msg: String| CliError::Config(format!("{origin}: field `{key}`: {msg}"));
        match key {
            "alpha" => {
                let a = parse_real(v, 128).map_err(|_| bad(format!("`{v}` is not a number")))?;
                if a <= -0.5 || !a.is_finite() {
                    return Err(bad("alpha must exceed -1/2".into()));
                }
                self.alpha_text = v.to_string();
                self.alpha_explicit = true;
            }
            "p" => {
                let p = Exponent::parse(v).map_err(|e| bad(e.to_string()))?;
                if p.as_f64() < 1.0 {
                    return Err(bad("p must lie in [1, inf]".into()));
                }
                self.p = p;
            }
            "precision_bits" => {
                let b: u32 = v.parse().map_err(|e| bad(format!("{e}")))?;
                if b < MIN_PRECISION {
                    return Err(bad(format!("must be at least {MIN_PRECISION}")));
                }
                self.precision_bits = b;
            }
            "trunc_degree" => {
                let n: usize = v.parse().map_err(|e| bad(format!("{e}")))?;
                if n == 0 {
                    return Err(bad("must be positive".into()));
                }
                self.trunc_degree = n;
            }
            "r_min" | "r_max" => {
                let r: f64 = v.parse().map_err(|e| bad(format!("{e}")))?;
                if !(r > 0.0 && r.is_finite()) {
                    return Err(bad("radii must be positive".into()));
                }
                if key == "r_min" {
                    self.r_min = r;
                } else {
                    self.r_max = r;
                }
            }
            "r_points" => {
                let n: usize = v.parse().map_err(|e| bad(format!("{e}")))?;
                if n < 2 {
                    return Err(bad("at least two radii are needed".into()));
                }
                self.r_points = n;
            }
            "seed" => self.seed = v.parse().map_err(|e| bad(format!("{e}")))?,
            "output" => self.output = Some(PathBuf::from(v)),
            "envelope" => self.envelope = RateEnvelope::parse(v).map_err(|e| bad(e.to_string()))?,
            _ => return Err(CliError::Config(format!("{origin}: unknown field `{key}`"))),
        }
        Ok(())
    }

    /// Applies a `key=value` file; blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let origin = format!("{}:{}", path.display(), i + 1);
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Config(format!("{origin}: expected `key=value`")));
            };
            self.set(k.trim(), v, &origin)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.r_min >= self.r_max {
            return Err(CliError::Config(format!(
                "field `r_min`: {} must be below r_max = {}",
                self.r_min, self.r_max
            )));
        }
        Ok(())
    }

    pub fn r_grid(&self) -> Vec<Float> {
        dunkl_core::growth::log_grid(self.r_min, self.r_max, self.r_points, self.precision_bits)
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={} p={} precision_bits={} trunc_degree={} r_min={} r_max={} r_points={} seed={} envelope={}",
            self.alpha_text,
            self.p,
            self.precision_bits,
            self.trunc_degree,
            self.r_min,
            self.r_max,
            self.r_points,
            self.seed,
            self.envelope
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.cfg");
        std::fs::write(&path, "# sweep\nalpha = 0.5\np=inf\n\nr_points=16\n").unwrap();
        let mut c = ExperimentConfig::default();
        c.apply_file(&path).unwrap();
        assert_eq!(c.alpha_text(), "0.5");
        assert_eq!(c.p, Exponent::Infinity);
        c.set("alpha", "1", "flag --alpha").unwrap();
        assert_eq!(c.alpha(), 1);
        assert_eq!(c.r_points, 16);
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.cfg");
        std::fs::write(&path, "alpha=0\nprecision_bits=12\n").unwrap();
        let err = ExperimentConfig::default().apply_file(&path).unwrap_err().to_string();
        assert!(err.contains(":2") && err.contains("precision_bits"), "{err}");
        let mut c = ExperimentConfig::default();
        assert!(c.set("alpha", "-0.5", "x").is_err());
        assert!(c.set("bogus", "1", "x").is_err());
        c.set("r_min", "500", "x").unwrap();
        assert!(c.validate().is_err());
    }
}
