//! Builders for hypercyclic and frequently hypercyclic functions of the
//! Dunkl operator, their verifiers, and the density obstruction check.
//!
//! Both builders glue target polynomials `Q` into a single series through
//! powers of the right inverse `S`, so that `Lambda^n f` reproduces `Q` at
//! the chosen positions `n` up to the contribution of the later blocks.
//!
//! Every verifier here is a finite-horizon check: conditions stated for all
//! `n` are tested for `n` up to the truncation degree only.

mod decay;
mod fhc;
mod hc;
mod plan_io;
mod targets;

use rug::Float;
use thiserror::Error;

use crate::dunkl::{DunklError, DunklWeights};
use crate::growth::{GrowthError, RateEnvelope};
use crate::numeric::HighComplex;
use crate::series::SeriesError;

pub use decay::{density_decay_check, DecayReport};
pub use fhc::{
    build_frequently_hypercyclic, frequency_counts, frequency_report, fuc_tail_norms, fuc_tail_norms_on, FhcConfig,
    FhcSchedule, FrequencyReport, FrequencyRow,
};
pub use hc::{
    build_hypercyclic, verify_orbit_hits, ConstructionPlan, HcConfig, HitReport, HitRow, PlanBlock,
};
pub use plan_io::{read_plan, write_fhc_schedule, write_hc_plan, PlanFile, PLAN_MAGIC};
pub use targets::{rational_height, GaussRational, TargetEnumeration, TargetPoly, DEFAULT_DMAX};

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("infeasible construction: {message} (largest achievable count {achieved})")]
    Infeasible { achieved: usize, message: String },
    #[error(transparent)]
    Dunkl(#[from] DunklError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Double-precision view of a radius grid used to screen candidate block
/// positions before any high-precision work.
#[derive(Clone, Debug)]
pub(crate) struct LogGrid {
    pub ln_r: Vec<f64>,
    /// `ln[r^a / (envelope(r) e^r)]`.
    pub ln_weight: Vec<f64>,
}

impl LogGrid {
    pub fn new(grid: &[Float], a: f64, env: &RateEnvelope) -> Self {
        let mut ln_r = Vec::with_capacity(grid.len());
        let mut ln_weight = Vec::with_capacity(grid.len());
        for r in grid {
            let rf = r.to_f64();
            let lr = rf.ln();
            let phi = env.eval(&Float::with_val(53, rf)).to_f64();
            ln_r.push(lr);
            ln_weight.push(a * lr - rf - phi.ln());
        }
        LogGrid { ln_r, ln_weight }
    }
}

/// `(t, ln|b_t| + ln d_t)` for the nonzero coefficients of a target.
pub(crate) fn log_target(q: &TargetPoly, w: &DunklWeights) -> Vec<(usize, f64)> {
    q.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(t, c)| (t, c.abs_f64().ln() + w.log_d_f64(t)))
        .collect()
}

pub(crate) fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    let top = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top;
    }
    top + v.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// `ln` of the triangle bound `sum_t |b_t| d_t R^{g+t} / d_{g+t}` for
/// `sup_{|z|=R} |S^g Q|`.
pub(crate) fn ln_shift_bound(lq: &[(usize, f64)], g: usize, ln_radius: f64, w: &DunklWeights) -> f64 {
    log_sum_exp(lq.iter().map(|&(t, l)| l - w.log_d_f64(g + t) + (g + t) as f64 * ln_radius))
}

/// Coefficients `(g + t, b_t d_t / d_{g+t})` of `S^g Q`.
pub(crate) fn shifted_block(q: &TargetPoly, g: usize, w: &DunklWeights) -> Vec<(usize, HighComplex)> {
    let prec = w.precision();
    q.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(t, c)| (g + t, c.to_complex(prec).scale(&w.quotient(t, g + t))))
        .collect()
}

/// `ln[envelope(R) e^R / R^{alpha+1}]`, the factor converting a weighted
/// norm bound into a bound on `|z| = R`.
pub(crate) fn ln_radius_factor(radius: f64, alpha: f64, env: &RateEnvelope) -> f64 {
    let phi = env.eval(&Float::with_val(53, radius)).to_f64();
    phi.ln() + radius - (alpha + 1.0) * radius.ln()
}

/// Sup of `|f|` over `m` equispaced points of the circle plus a local
/// refinement around the best sample, from terms already on the circle.
pub(crate) fn sampled_sup(terms: &crate::series::circle::CircleTerms, prec: u32, m: usize) -> Float {
    crate::means::mean_p_fast(terms, prec, crate::means::Exponent::Infinity, Some(m.max(1)))
}

/// `ln d_n` in double precision for every `n`, continued past the weight
/// table with the ratio recurrence.
#[derive(Clone, Debug)]
pub(crate) struct LogWeightsF64 {
    alpha: f64,
    table: Vec<f64>,
}

impl LogWeightsF64 {
    pub fn new(w: &DunklWeights) -> Self {
        LogWeightsF64 {
            alpha: w.alpha().to_f64(),
            table: (0..=w.trunc_degree()).map(|n| w.log_d_f64(n)).collect(),
        }
    }

    pub fn get(&mut self, n: usize) -> f64 {
        while self.table.len() <= n {
            let k = self.table.len();
            let a = if k % 2 == 0 { k as f64 } else { k as f64 + 1.0 + 2.0 * self.alpha };
            let last = self.table[k - 1];
            self.table.push(last + a.ln());
        }
        self.table[n]
    }
}
