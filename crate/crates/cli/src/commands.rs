use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use dunkl_core::construct::{
    build_frequently_hypercyclic, build_hypercyclic, density_decay_check, frequency_report, read_plan,
    verify_orbit_hits, write_fhc_schedule, write_hc_plan, ConstructError, FhcConfig, FhcSchedule, HcConfig,
    PlanFile, DEFAULT_DMAX,
};
use dunkl_core::dunkl::apply_dunkl;
use dunkl_core::dynamics::{orbit_at_zero, thm3b_bound_check};
use dunkl_core::growth::{barnes_residual_fit, lemma1_ratio, lemma3_ratio};
use dunkl_core::means::{hausdorff_young_check, mean_p, MeanParams};
use dunkl_core::numeric::{format_decimal, format_exact};
use dunkl_core::report::CsvTable;
use dunkl_core::series::{read_series, write_series};
use dunkl_core::{DunklWeights, TruncatedSeries};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;

use crate::config::ExperimentConfig;
use crate::CliError;

/// Digits printed for derived quantities.
const DIGITS: usize = 20;

/// A finished table plus the reason the run counts as a failed
/// verification, if any.
pub struct Outcome {
    pub table: CsvTable,
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(table: CsvTable) -> Self {
        Outcome { table, failure: None }
    }
}

pub fn emit(table: &CsvTable, output: Option<&Path>) -> Result<(), CliError> {
    let io = |e: String| match output {
        Some(path) => CliError::Io(format!("{}: {e}", path.display())),
        None => CliError::Io(e),
    };
    let mut out: Box<dyn Write> = match output {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| io(e.to_string()))?)),
        None => Box::new(std::io::stdout().lock()),
    };
    table.write(&mut out).map_err(|e| io(e.to_string()))?;
    out.flush().map_err(|e| io(e.to_string()))
}

fn banner(cfg: &ExperimentConfig, command: &str, extra: String) -> String {
    if extra.is_empty() {
        format!("{cfg} command={command}")
    } else {
        format!("{cfg} command={command} {extra}")
    }
}

fn make_weights(cfg: &ExperimentConfig, alpha: &Float, trunc: usize) -> Result<DunklWeights, CliError> {
    DunklWeights::new(alpha, trunc, cfg.precision_bits).map_err(|e| CliError::Config(e.to_string()))
}

fn construct_err(e: ConstructError) -> CliError {
    match e {
        ConstructError::Infeasible { achieved, message } => {
            CliError::Infeasible(format!("{message} (largest achievable count {achieved})"))
        }
        ConstructError::Io(e) => CliError::Io(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

/// Reads a series file. Its `alpha` is authoritative; an explicitly
/// configured alpha must agree with it.
fn load_series(cfg: &ExperimentConfig, path: &Path) -> Result<(TruncatedSeries, Float), CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let sf = read_series(BufReader::new(file)).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if cfg.alpha_explicit {
        let configured = cfg.alpha();
        if Float::with_val(sf.alpha.prec(), &configured) != sf.alpha {
            return Err(CliError::Config(format!(
                "field `alpha`: configured {} but {} was written for alpha = {}",
                cfg.alpha_text(),
                path.display(),
                format_exact(&sf.alpha)
            )));
        }
    }
    Ok((sf.series, sf.alpha))
}

fn load_plan(path: &Path, alpha: &Float) -> Result<PlanFile, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let plan = read_plan(BufReader::new(file)).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let plan_alpha = match &plan {
        PlanFile::Hc(p) => &p.alpha,
        PlanFile::Fhc(s) => &s.alpha,
    };
    if Float::with_val(alpha.prec(), plan_alpha) != *alpha {
        return Err(CliError::Config(format!(
            "{}: plan alpha = {} differs from the series alpha = {}",
            path.display(),
            format_exact(plan_alpha),
            format_exact(alpha)
        )));
    }
    Ok(plan)
}

fn save_series(path: &Path, alpha: &Float, f: &TruncatedSeries) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    write_series(&mut w, alpha, f).map_err(io)?;
    w.flush().map_err(io)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn real(x: f64, prec: u32) -> Float {
    Float::with_val(prec, x)
}

#[derive(Args, Debug)]
pub struct WeightsArgs {
    /// Largest index tabulated
    #[arg(long, default_value_t = 16)]
    pub n: usize,
}

pub fn weights(cfg: &ExperimentConfig, a: &WeightsArgs) -> Result<Outcome, CliError> {
    let w = make_weights(cfg, &cfg.alpha(), a.n)?;
    let mut t = CsvTable::new(banner(cfg, "weights", format!("n={}", a.n)), &["n", "d_n", "log_d_n"]);
    for n in 0..=a.n {
        t.push(vec![n.to_string(), format_decimal(&w.d(n), 30), format_decimal(&w.log_d(n), 30)]);
    }
    Ok(Outcome::ok(t))
}

#[derive(Args, Debug)]
pub struct ApplyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Power of the operator
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long)]
    pub series_out: Option<PathBuf>,
}

pub fn apply(cfg: &ExperimentConfig, a: &ApplyArgs) -> Result<Outcome, CliError> {
    let (f, alpha) = load_series(cfg, &a.input)?;
    let w = make_weights(cfg, &alpha, f.trunc_degree())?;
    let image = apply_dunkl(&f, &w, a.k);
    if let Some(path) = &a.series_out {
        save_series(path, &alpha, &image)?;
    }
    let mut t = CsvTable::new(banner(cfg, "apply", format!("series_alpha={} k={}", format_exact(&alpha), a.k)), &["n", "re", "im"]);
    for (n, c) in image.nonzero_terms() {
        t.push(vec![n.to_string(), format_exact(&c.re), format_exact(&c.im)]);
    }
    Ok(Outcome::ok(t))
}

#[derive(Args, Debug)]
pub struct MeansArgs {
    /// Series file; a seeded random polynomial is used when absent
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Degree of the random polynomial
    #[arg(long, default_value_t = 32)]
    pub degree: usize,
}

pub fn means(cfg: &ExperimentConfig, a: &MeansArgs) -> Result<Outcome, CliError> {
    let mut source = format!("degree={}", a.degree);
    let f = match &a.input {
        Some(path) => {
            let (f, alpha) = load_series(cfg, path)?;
            source = format!("series_alpha={} input={}", format_exact(&alpha), path.display());
            f
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            TruncatedSeries::random_polynomial(&mut rng, a.degree, a.degree, cfg.precision_bits)
                .map_err(|e| CliError::Config(e.to_string()))?
        }
    };
    let mp = MeanParams::new(cfg.p);
    let mut t = CsvTable::new(banner(cfg, "means", source), &["r", "M_p", "quadrature_err"]);
    for r in cfg.r_grid() {
        let m = mean_p(&f, &r, &mp);
        t.push(vec![
            format_decimal(&r, DIGITS),
            format_decimal(&m.value, DIGITS),
            format_decimal(&m.richardson_err, 6),
        ]);
    }
    Ok(Outcome::ok(t))
}

#[derive(Args, Debug)]
pub struct Lemma1Args {
    #[arg(long, default_value_t = 5000)]
    pub n_max: usize,
    /// Lower end of the accepted band
    #[arg(long)]
    pub band_lo: Option<f64>,
    /// Upper end of the accepted band
    #[arg(long)]
    pub band_hi: Option<f64>,
}

pub fn verify_lemma1(cfg: &ExperimentConfig, a: &Lemma1Args) -> Result<Outcome, CliError> {
    let w = make_weights(cfg, &cfg.alpha(), a.n_max)?;
    let extra = format!("n_max={} band_lo={:?} band_hi={:?}", a.n_max, a.band_lo, a.band_hi);
    let mut t = CsvTable::new(banner(cfg, "verify-lemma1", extra), &["n", "ratio"]);
    let mut failure = None;
    for n in 0..=a.n_max {
        let v = lemma1_ratio(n, &w);
        let x = v.to_f64();
        let outside = a.band_lo.is_some_and(|lo| x < lo) || a.band_hi.is_some_and(|hi| x > hi);
        if outside && failure.is_none() {
            failure = Some(format!("ratio {x} at n = {n} leaves the band"));
        }
        t.push(vec![n.to_string(), format_decimal(&v, DIGITS)]);
    }
    Ok(Outcome { table: t, failure })
}

#[derive(Args, Debug)]
pub struct Lemma3Args {
    /// Exponent of the power sum, in [1, 2]
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
}

pub fn verify_lemma3(cfg: &ExperimentConfig, a: &Lemma3Args) -> Result<Outcome, CliError> {
    let w = make_weights(cfg, &cfg.alpha(), cfg.trunc_degree)?;
    let mut t = CsvTable::new(banner(cfg, "verify-lemma3", format!("q={}", a.q)), &["r", "ratio"]);
    let mut failure = None;
    for r in cfg.r_grid() {
        let v = lemma3_ratio(&r, a.q, &w, None).map_err(|e| CliError::Config(e.to_string()))?;
        if !v.is_finite() && failure.is_none() {
            failure = Some(format!("ratio is not finite at r = {}", r.to_f64()));
        }
        t.push(vec![format_decimal(&r, DIGITS), format_decimal(&v, DIGITS)]);
    }
    Ok(Outcome { table: t, failure })
}

#[derive(Args, Debug)]
pub struct HyArgs {
    /// Number of random polynomials
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 16)]
    pub degree: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,5")]
    pub radii: Vec<f64>,
}

pub fn verify_hy(cfg: &ExperimentConfig, a: &HyArgs) -> Result<Outcome, CliError> {
    let prec = cfg.precision_bits;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mp = MeanParams::new(cfg.p);
    let extra = format!("count={} degree={} radii={:?}", a.count, a.degree, a.radii);
    let mut t = CsvTable::new(banner(cfg, "verify-hy", extra), &["poly", "r", "lhs", "rhs", "margin"]);
    let mut failure = None;
    for i in 0..a.count {
        let f = TruncatedSeries::random_polynomial(&mut rng, a.degree, a.degree, prec)
            .map_err(|e| CliError::Config(e.to_string()))?;
        for &r in &a.radii {
            let hy = hausdorff_young_check(&f, &real(r, prec), &mp).map_err(|e| CliError::Config(e.to_string()))?;
            let floor = Float::with_val(prec, &hy.rhs * -1e-6);
            if hy.margin < floor && failure.is_none() {
                failure = Some(format!("polynomial {i} at r = {r}: margin {}", hy.margin.to_f64()));
            }
            t.push(vec![
                i.to_string(),
                r.to_string(),
                format_decimal(&hy.lhs, DIGITS),
                format_decimal(&hy.rhs, DIGITS),
                format_decimal(&hy.margin, 6),
            ]);
        }
    }
    Ok(Outcome { table: t, failure })
}

#[derive(Args, Debug)]
pub struct BarnesArgs {
    #[arg(long, default_value_t = 1.0)]
    pub ml_alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, value_delimiter = ',', default_value = "10000,20000,40000,80000")]
    pub radii: Vec<f64>,
}

pub fn verify_barnes(cfg: &ExperimentConfig, a: &BarnesArgs) -> Result<Outcome, CliError> {
    let prec = cfg.precision_bits;
    let radii: Vec<Float> = a.radii.iter().map(|&r| real(r, prec)).collect();
    let fit = barnes_residual_fit(&real(a.ml_alpha, prec), &real(a.theta, prec), &real(a.beta, prec), &radii)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let extra = format!("ml_alpha={} theta={} beta={} slope={:?}", a.ml_alpha, a.theta, a.beta, fit.slope);
    let mut t = CsvTable::new(banner(cfg, "verify-barnes", extra), &["r", "ratio", "residual"]);
    for ((r, ratio), res) in fit.r.iter().zip(&fit.ratio).zip(&fit.residual) {
        t.push(vec![format_decimal(r, DIGITS), format_decimal(ratio, DIGITS), format_decimal(res, 6)]);
    }
    let failure = (!fit.consistent).then(|| {
        format!("ratio band held: {}, residual slope: {:?}", fit.within_band, fit.slope)
    });
    Ok(Outcome { table: t, failure })
}

#[derive(Args, Debug)]
pub struct BuildHcArgs {
    /// Number of target blocks
    #[arg(long, default_value_t = 12)]
    pub targets: usize,
    #[arg(long, default_value_t = 1)]
    pub first_target: usize,
    /// Largest target degree in the enumeration
    #[arg(long, default_value_t = DEFAULT_DMAX)]
    pub dmax: usize,
    #[arg(long, default_value_t = 2.0)]
    pub hit_radius: f64,
    #[arg(long)]
    pub series_out: Option<PathBuf>,
    #[arg(long)]
    pub plan_out: Option<PathBuf>,
}

pub fn build_hc(cfg: &ExperimentConfig, a: &BuildHcArgs) -> Result<Outcome, CliError> {
    let alpha = cfg.alpha();
    let w = make_weights(cfg, &alpha, cfg.trunc_degree)?;
    let mut hc = HcConfig::new(cfg.precision_bits);
    hc.dmax = a.dmax;
    hc.first_target = a.first_target;
    hc.hit_radius = a.hit_radius;
    hc.grid = cfg.r_grid();
    let (f, plan) = build_hypercyclic(&w, &cfg.envelope, a.targets, &hc).map_err(construct_err)?;
    if let Some(path) = &a.series_out {
        save_series(path, &alpha, &f)?;
    }
    if let Some(path) = &a.plan_out {
        let mut out = create(path)?;
        write_hc_plan(&mut out, &plan).map_err(construct_err)?;
        out.flush()?;
    }
    let extra = format!(
        "targets={} first_target={} dmax={} hit_radius={}",
        a.targets, a.first_target, a.dmax, a.hit_radius
    );
    let mut t = CsvTable::new(
        banner(cfg, "build-hc", extra),
        &["k", "target_index", "target", "position", "budget", "grid_norm"],
    );
    for b in &plan.blocks {
        t.push(vec![
            b.k.to_string(),
            b.target_index.map(|i| i.to_string()).unwrap_or_default(),
            b.target.to_string(),
            b.position.to_string(),
            format_decimal(&b.budget, DIGITS),
            format_decimal(&b.grid_norm, DIGITS),
        ]);
    }
    Ok(Outcome::ok(t))
}

#[derive(Args, Debug)]
pub struct BuildFhcArgs {
    #[arg(long, default_value_t = 3)]
    pub targets: usize,
    #[arg(long, default_value_t = 1)]
    pub first_target: usize,
    #[arg(long, default_value_t = DEFAULT_DMAX)]
    pub dmax: usize,
    /// Block width; chosen automatically when absent
    #[arg(long)]
    pub block_width: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub hit_radius: f64,
    #[arg(long, default_value_t = 0.1)]
    pub hit_tolerance: f64,
    #[arg(long, default_value_t = 0.5)]
    pub norm_budget: f64,
    #[arg(long)]
    pub series_out: Option<PathBuf>,
    #[arg(long)]
    pub plan_out: Option<PathBuf>,
}

pub fn build_fhc(cfg: &ExperimentConfig, a: &BuildFhcArgs) -> Result<Outcome, CliError> {
    let alpha = cfg.alpha();
    let w = make_weights(cfg, &alpha, cfg.trunc_degree)?;
    let mut fc = FhcConfig::new(cfg.precision_bits);
    fc.dmax = a.dmax;
    fc.first_target = a.first_target;
    fc.block_width = a.block_width;
    fc.hit_radius = a.hit_radius;
    fc.hit_tolerance = a.hit_tolerance;
    fc.norm_budget = a.norm_budget;
    fc.grid = cfg.r_grid();
    let (f, s) = build_frequently_hypercyclic(&w, cfg.p, &cfg.envelope, a.targets, &fc).map_err(construct_err)?;
    if let Some(path) = &a.series_out {
        save_series(path, &alpha, &f)?;
    }
    if let Some(path) = &a.plan_out {
        let mut out = create(path)?;
        write_fhc_schedule(&mut out, &s).map_err(construct_err)?;
        out.flush()?;
    }
    let extra = format!(
        "targets={} first_target={} dmax={} hit_radius={} hit_tolerance={} norm_budget={} block_width={} start={}",
        a.targets, a.first_target, a.dmax, a.hit_radius, a.hit_tolerance, a.norm_budget, s.block_width, s.start
    );
    let mut t = CsvTable::new(banner(cfg, "build-fhc", extra), &["j", "target_index", "target", "nominal_density"]);
    for (i, (index, q)) in s.targets.iter().enumerate() {
        t.push(vec![
            (i + 1).to_string(),
            index.map(|i| i.to_string()).unwrap_or_default(),
            q.to_string(),
            s.nominal_density(i + 1).to_string(),
        ]);
    }
    Ok(Outcome::ok(t))
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Last orbit index; the truncation degree when absent
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Construction plan whose hits are verified
    #[arg(long)]
    pub plan: Option<PathBuf>,
    /// Radius on which hits are measured
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    /// Circle samples per hit check
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    /// Per-block hit table
    #[arg(long)]
    pub hits_out: Option<PathBuf>,
    /// Windowed C_star table
    #[arg(long)]
    pub c_star_out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
    pub windows: Vec<f64>,
}

pub fn orbit(cfg: &ExperimentConfig, a: &OrbitArgs) -> Result<Outcome, CliError> {
    let (f, alpha) = load_series(cfg, &a.input)?;
    let w = make_weights(cfg, &alpha, f.trunc_degree())?;
    let horizon = a.horizon.unwrap_or(f.trunc_degree()).min(f.trunc_degree());
    let extra = format!(
        "series_alpha={} horizon={horizon} radius={} samples={} windows={:?}",
        format_exact(&alpha),
        a.radius,
        a.samples,
        a.windows
    );
    let mut failures = Vec::new();

    if let Some(path) = &a.plan {
        match load_plan(path, &alpha)? {
            PlanFile::Hc(plan) => {
                let report = verify_orbit_hits(&f, &plan, &w, a.radius, a.samples);
                if !report.all_pass() {
                    let bad: Vec<String> = report.rows.iter().filter(|r| !r.pass).map(|r| r.k.to_string()).collect();
                    failures.push(format!("blocks {} miss their budgets", bad.join(",")));
                }
                if let Some(out) = &a.hits_out {
                    let mut t = CsvTable::new(
                        banner(cfg, "orbit", extra.clone()),
                        &["k", "position", "delta", "budget", "pass"],
                    );
                    for r in &report.rows {
                        t.push(vec![
                            r.k.to_string(),
                            r.position.to_string(),
                            format_decimal(&r.delta, 6),
                            format_decimal(&r.budget, 6),
                            r.pass.to_string(),
                        ]);
                    }
                    emit(&t, Some(out))?;
                }
            }
            PlanFile::Fhc(_) => {
                return Err(CliError::Config(format!(
                    "{}: orbit verifies hypercyclic plans; use `frequency` for schedules",
                    path.display()
                )))
            }
        }
    }

    let check = thm3b_bound_check(&f, &w, &cfg.r_grid(), horizon);
    if !check.consistent || !check.pointwise {
        failures.push(format!(
            "orbit sup {} exceeds the Cauchy-estimate bound (C_star = {})",
            check.orbit_sup.to_f64(),
            check.c_star.to_f64()
        ));
    }
    if let Some(out) = &a.c_star_out {
        let mut t = CsvTable::new(banner(cfg, "orbit", extra.clone()), &["rmax", "C_star"]);
        for &r_max in &a.windows {
            t.push(vec![r_max.to_string(), format_decimal(&check.windowed_c_star(r_max), DIGITS)]);
        }
        emit(&t, Some(out))?;
    }

    let rep = orbit_at_zero(&f, &w, horizon);
    let mut t = CsvTable::new(banner(cfg, "orbit", extra), &["n", "log_abs_orbit"]);
    for n in 0..=rep.horizon() {
        let v = rep.log_abs(n).map_or_else(|| "-inf".to_string(), |l| format_decimal(l, DIGITS));
        t.push(vec![n.to_string(), v]);
    }
    let failure = (!failures.is_empty()).then(|| failures.join("; "));
    Ok(Outcome { table: t, failure })
}

#[derive(Args, Debug)]
pub struct FrequencyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Schedule written by `build-fhc`
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long, default_value_t = 2048)]
    pub window: usize,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
}

pub fn frequency(cfg: &ExperimentConfig, a: &FrequencyArgs) -> Result<Outcome, CliError> {
    let (f, alpha) = load_series(cfg, &a.input)?;
    let w = make_weights(cfg, &alpha, f.trunc_degree())?;
    let schedule: FhcSchedule = match load_plan(&a.plan, &alpha)? {
        PlanFile::Fhc(s) => s,
        PlanFile::Hc(_) => {
            return Err(CliError::Config(format!("{}: not a frequently hypercyclic schedule", a.plan.display())))
        }
    };
    let rep = frequency_report(&f, &schedule, &w, a.window, a.eps, a.radius, a.samples).map_err(construct_err)?;
    let extra = format!(
        "series_alpha={} window={} eps={} radius={} samples={}",
        format_exact(&alpha),
        a.window,
        a.eps,
        a.radius,
        a.samples
    );
    let mut t = CsvTable::new(
        banner(cfg, "frequency", extra),
        &["j", "target_index", "target", "nominal", "scheduled", "hits", "empirical"],
    );
    let mut failure = None;
    for (row, (_, q)) in rep.rows.iter().zip(&schedule.targets) {
        if row.empirical < 0.5 * row.nominal && failure.is_none() {
            failure = Some(format!(
                "target {}: density {} is below half of {}",
                row.j, row.empirical, row.nominal
            ));
        }
        t.push(vec![
            row.j.to_string(),
            row.target_index.map(|i| i.to_string()).unwrap_or_default(),
            q.to_string(),
            row.nominal.to_string(),
            row.scheduled.to_string(),
            row.hits.to_string(),
            row.empirical.to_string(),
        ]);
    }
    Ok(Outcome { table: t, failure })
}

#[derive(Args, Debug)]
pub struct DecayArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Exponent in [1, 2]
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    /// Largest average index; the truncation degree when absent
    #[arg(long)]
    pub horizon: Option<usize>,
}

pub fn decay(cfg: &ExperimentConfig, a: &DecayArgs) -> Result<Outcome, CliError> {
    let (f, alpha) = load_series(cfg, &a.input)?;
    let w = make_weights(cfg, &alpha, f.trunc_degree())?;
    let horizon = a.horizon.unwrap_or(f.trunc_degree());
    let rep = density_decay_check(&f, &w, a.q, horizon).map_err(construct_err)?;
    let extra = format!("series_alpha={} q={} horizon={horizon}", format_exact(&alpha), a.q);
    let mut t = CsvTable::new(banner(cfg, "decay", extra), &["m", "sigma", "event_fraction"]);
    for m in 1..=rep.horizon {
        t.push(vec![m.to_string(), format_decimal(rep.sigma_at(m), DIGITS), rep.event_fraction(m).to_string()]);
    }
    let failure = (!rep.bound_holds()).then(|| "event fraction exceeds sigma".to_string());
    Ok(Outcome { table: t, failure })
}
