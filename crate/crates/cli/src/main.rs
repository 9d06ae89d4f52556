//! Experiment runner for the `dunkl-core` toolkit.
//!
//! Every subcommand writes a CSV table, preceded by a `# config: ...` line,
//! to `--output` or standard output. Exit codes: 1 for invalid
//! configuration or I/O errors, 2 for infeasible constructions, 3 when a
//! verification fails.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::ExperimentConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("infeasible construction: {0}")]
    Infeasible(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Infeasible(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "dunkl", version, about = "Dunkl operator experiments")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

/// Overrides for the experiment configuration; they win over `--config`.
#[derive(Args, Debug)]
struct GlobalArgs {
    /// `key=value` configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Mean exponent, a number in [1, inf] or `inf`
    #[arg(long, global = true)]
    p: Option<String>,
    #[arg(long, global = true)]
    precision_bits: Option<String>,
    #[arg(long, global = true)]
    trunc_degree: Option<String>,
    #[arg(long, global = true)]
    r_min: Option<String>,
    #[arg(long, global = true)]
    r_max: Option<String>,
    #[arg(long, global = true)]
    r_points: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// CSV destination; standard output when absent
    #[arg(long, global = true)]
    output: Option<String>,
    /// `log`, `inverse_log` or `constant:<c>`
    #[arg(long, global = true)]
    envelope: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Table of d_n(alpha)
    Weights(commands::WeightsArgs),
    /// Apply a power of the operator to a series file
    Apply(commands::ApplyArgs),
    /// Integral means over the radius grid
    Means(commands::MeansArgs),
    /// Weight ratio against the Stirling-type envelope
    VerifyLemma1(commands::Lemma1Args),
    /// Power sums of r^n / d_n against their envelope
    VerifyLemma3(commands::Lemma3Args),
    /// Hausdorff-Young inequality on random polynomials
    VerifyHy(commands::HyArgs),
    /// Mittag-Leffler values against their asymptotic form
    VerifyBarnes(commands::BarnesArgs),
    /// Build a hypercyclic function
    BuildHc(commands::BuildHcArgs),
    /// Build a frequently hypercyclic function
    BuildFhc(commands::BuildFhcArgs),
    /// Orbit of the origin, hit verification and the C_star check
    Orbit(commands::OrbitArgs),
    /// Empirical hit frequencies of a scheduled construction
    Frequency(commands::FrequencyArgs),
    /// Averages of (|c_n| d_n)^q and orbit events
    Decay(commands::DecayArgs),
}

fn build_config(g: &GlobalArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &g.config {
        cfg.apply_file(path)?;
    }
    let flags = [
        ("alpha", &g.alpha),
        ("p", &g.p),
        ("precision_bits", &g.precision_bits),
        ("trunc_degree", &g.trunc_degree),
        ("r_min", &g.r_min),
        ("r_max", &g.r_max),
        ("r_points", &g.r_points),
        ("seed", &g.seed),
        ("output", &g.output),
        ("envelope", &g.envelope),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v, &format!("flag --{}", key.replace('_', "-")))?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = build_config(&cli.global)?;
    let outcome = match &cli.command {
        Command::Weights(a) => commands::weights(&cfg, a),
        Command::Apply(a) => commands::apply(&cfg, a),
        Command::Means(a) => commands::means(&cfg, a),
        Command::VerifyLemma1(a) => commands::verify_lemma1(&cfg, a),
        Command::VerifyLemma3(a) => commands::verify_lemma3(&cfg, a),
        Command::VerifyHy(a) => commands::verify_hy(&cfg, a),
        Command::VerifyBarnes(a) => commands::verify_barnes(&cfg, a),
        Command::BuildHc(a) => commands::build_hc(&cfg, a),
        Command::BuildFhc(a) => commands::build_fhc(&cfg, a),
        Command::Orbit(a) => commands::orbit(&cfg, a),
        Command::Frequency(a) => commands::frequency(&cfg, a),
        Command::Decay(a) => commands::decay(&cfg, a),
    }?;
    commands::emit(&outcome.table, cfg.output.as_deref())?;
    match outcome.failure {
        Some(msg) => Err(CliError::Verification(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dunkl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
