use rug::Float;

use super::{
    ln_radius_factor, ln_shift_bound, log_target, sampled_sup, shifted_block, ConstructError, LogGrid,
    TargetEnumeration, TargetPoly, DEFAULT_DMAX,
};
use crate::dunkl::{DunklWeights, ScreenedSeries};
use crate::growth::{standard_grid, weight_factor, EnvelopeKind, RateEnvelope};
use crate::means::{mean_p_fast, Exponent};
use crate::numeric::{pow2, HighComplex};
use crate::series::circle::CircleTerms;
use crate::series::TruncatedSeries;

/// Tolerance, in natural-log units, below which the double-precision
/// screen defers to a high-precision evaluation.
const SCREEN_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct HcConfig {
    pub dmax: usize,
    /// Enumeration index of the first target; block `k` uses index
    /// `first_target + k - 1`.
    pub first_target: usize,
    /// Explicit targets replacing the enumeration.
    pub targets: Option<Vec<TargetPoly>>,
    /// Radii on which the weighted norm is evaluated.
    pub grid: Vec<Float>,
    /// Circle samples per radius when a block norm is computed exactly.
    pub block_quad_points: usize,
    /// Radius `R` on which later blocks must stay below their share of the
    /// hit budget.
    pub hit_radius: f64,
}

impl HcConfig {
    pub fn new(prec: u32) -> Self {
        HcConfig {
            dmax: DEFAULT_DMAX,
            first_target: 1,
            targets: None,
            grid: standard_grid(prec),
            block_quad_points: 128,
            hit_radius: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanBlock {
    /// 1-based block number.
    pub k: usize,
    /// Enumeration index of the target, when it came from the enumeration.
    pub target_index: Option<usize>,
    pub target: TargetPoly,
    pub position: usize,
    /// `2^-k`.
    pub budget: Float,
    /// Weighted norm of `S^position Q_k` over the grid.
    pub grid_norm: Float,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionPlan {
    pub alpha: Float,
    pub envelope: RateEnvelope,
    pub dmax: usize,
    pub hit_radius: f64,
    pub trunc_degree: usize,
    pub blocks: Vec<PlanBlock>,
}

impl ConstructionPlan {
    /// Checks disjointness of the blocks and that they fit the truncation.
    pub fn check(&self) -> Result<(), ConstructError> {
        let mut end: i64 = -1;
        for b in &self.blocks {
            if (b.position as i64) <= end {
                return Err(ConstructError::Parameter(format!("block {} overlaps the previous block", b.k)));
            }
            end = b.position as i64 + b.target.degree().max(0);
            if end as usize > self.trunc_degree {
                return Err(ConstructError::Parameter(format!("block {} exceeds the truncation degree", b.k)));
            }
        }
        Ok(())
    }

    /// The series `sum_k S^{m_k} Q_k` described by the plan.
    pub fn assemble(&self, w: &DunklWeights) -> Result<TruncatedSeries, ConstructError> {
        self.check()?;
        let mut f = TruncatedSeries::zero(self.trunc_degree, w.precision());
        for b in &self.blocks {
            for (n, c) in shifted_block(&b.target, b.position, w) {
                f.set_coeff(n, c)?;
            }
        }
        Ok(f)
    }
}

/// Greedy placement of `k_targets` blocks: each position is the smallest
/// one after the previous block whose block has weighted norm at most
/// `2^-k` on the grid (weight `r^{alpha+1} / (envelope(r) e^r)`, sup mean)
/// and whose images under `Lambda^{m_i}`, `i < k`, stay below `2^-k` times
/// `envelope(R) e^R / R^{alpha+1}` on `|z| = R`.
pub fn build_hypercyclic(
    w: &DunklWeights,
    env: &RateEnvelope,
    k_targets: usize,
    cfg: &HcConfig,
) -> Result<(TruncatedSeries, ConstructionPlan), ConstructError> {
    if k_targets == 0 {
        return Err(ConstructError::Parameter("at least one target is required".into()));
    }
    if env.kind() != EnvelopeKind::ToInfinity {
        return Err(ConstructError::Parameter(format!("envelope `{env}` does not tend to infinity")));
    }
    if cfg.grid.is_empty() || !(cfg.hit_radius > 0.0) {
        return Err(ConstructError::Parameter("empty grid or nonpositive hit radius".into()));
    }
    env.check_on(&cfg.grid)?;
    let prec = w.precision();
    let trunc = w.trunc_degree();
    let alpha = w.alpha().to_f64();
    let a = Float::with_val(prec, w.alpha() + 1u32);
    let lgrid = LogGrid::new(&cfg.grid, alpha + 1.0, env);
    let ln_radius = cfg.hit_radius.ln();
    let ln_factor = ln_radius_factor(cfg.hit_radius, alpha, env);

    let targets: Vec<(Option<usize>, TargetPoly)> = match &cfg.targets {
        Some(t) => {
            if t.len() < k_targets {
                return Err(ConstructError::Parameter(format!("{} targets given, {k_targets} requested", t.len())));
            }
            t.iter().take(k_targets).map(|q| (None, q.clone())).collect()
        }
        None => {
            let e = TargetEnumeration::new(cfg.dmax);
            (0..k_targets).map(|i| (Some(cfg.first_target + i), e.target(cfg.first_target + i))).collect()
        }
    };

    let mut blocks: Vec<PlanBlock> = Vec::with_capacity(k_targets);
    let mut next_free = 1usize;
    for (i, (index, q)) in targets.into_iter().enumerate() {
        let k = i + 1;
        let ln_eps = -(k as f64) * std::f64::consts::LN_2;
        let budget = pow2(prec, -(k as i32));
        let lq = log_target(&q, w);
        let deg = q.degree().max(0) as usize;
        let mut m = next_free;
        let found = loop {
            if m + deg > trunc {
                break None;
            }
            if lq.is_empty() {
                break Some(Float::new(prec));
            }
            let hits_ok = blocks
                .iter()
                .all(|b| ln_shift_bound(&lq, m - b.position, ln_radius, w) <= ln_eps + ln_factor - SCREEN_SLACK);
            if hits_ok {
                if let Some(norm) = block_norm_if_within(&q, &lq, m, w, &lgrid, cfg, &a, env, ln_eps, &budget) {
                    break Some(norm);
                }
            }
            m += 1;
        };
        let Some(grid_norm) = found else {
            return Err(ConstructError::Infeasible {
                achieved: blocks.len(),
                message: format!("block {k} does not fit below truncation degree {trunc}"),
            });
        };
        next_free = m + deg + 1;
        blocks.push(PlanBlock { k, target_index: index, target: q, position: m, budget, grid_norm });
    }

    let plan = ConstructionPlan {
        alpha: w.alpha().clone(),
        envelope: env.clone(),
        dmax: cfg.dmax,
        hit_radius: cfg.hit_radius,
        trunc_degree: trunc,
        blocks,
    };
    let f = plan.assemble(w)?;
    Ok((f, plan))
}

/// Weighted grid norm of `S^m Q` if it is at most the budget. The cheap
/// bounds (triangle inequality above, largest coefficient below) settle
/// most candidates; the rest are sampled at full precision.
#[allow(clippy::too_many_arguments)]
fn block_norm_if_within(
    q: &TargetPoly,
    lq: &[(usize, f64)],
    m: usize,
    w: &DunklWeights,
    lgrid: &LogGrid,
    cfg: &HcConfig,
    a: &Float,
    env: &RateEnvelope,
    ln_eps: f64,
    budget: &Float,
) -> Option<Float> {
    let mut upper = f64::NEG_INFINITY;
    let mut lower = f64::NEG_INFINITY;
    for (lr, lw) in lgrid.ln_r.iter().zip(&lgrid.ln_weight) {
        let logs = lq.iter().map(|&(t, l)| l - w.log_d_f64(m + t) + (m + t) as f64 * lr + lw);
        let top = logs.clone().fold(f64::NEG_INFINITY, f64::max);
        lower = lower.max(top);
        upper = upper.max(super::log_sum_exp(logs));
    }
    if lower > ln_eps + SCREEN_SLACK {
        return None;
    }
    let norm = block_grid_norm(q, m, w, &cfg.grid, cfg.block_quad_points, a, env);
    if upper < ln_eps - SCREEN_SLACK || norm <= *budget {
        Some(norm)
    } else {
        None
    }
}

/// `max_r M_inf(S^m Q, r) r^a / (envelope(r) e^r)` over the grid.
pub(crate) fn block_grid_norm(
    q: &TargetPoly,
    m: usize,
    w: &DunklWeights,
    grid: &[Float],
    quad_points: usize,
    a: &Float,
    env: &RateEnvelope,
) -> Float {
    let prec = w.precision();
    let block = shifted_block(q, m, w);
    let mut best = Float::new(prec);
    for r in grid {
        let r = Float::with_val(prec, r);
        let terms = CircleTerms::new(block.iter().map(|(n, c)| (*n, c)), &r, prec);
        let v = mean_p_fast(&terms, prec, Exponent::Infinity, Some(quad_points)) * weight_factor(&r, a, env);
        if v > best {
            best = v;
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct HitRow {
    pub k: usize,
    pub position: usize,
    /// Sampled sup of `|Lambda^{m_k} f - Q_k|` on `|z| = R`.
    pub delta: Float,
    pub budget: Float,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct HitReport {
    pub radius: f64,
    pub rows: Vec<HitRow>,
}

impl HitReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// For each block, compares `Lambda^{m_k} f - Q_k` on `|z| = R` with
/// `sum_{j>k} 2^-j envelope(R) e^R / R^{alpha+1}` plus a rounding allowance
/// of `2^{40-prec}` relative to `Q_k`.
pub fn verify_orbit_hits(
    f: &TruncatedSeries,
    plan: &ConstructionPlan,
    w: &DunklWeights,
    radius: f64,
    samples: usize,
) -> HitReport {
    let prec = w.precision();
    let alpha = w.alpha().to_f64();
    let r = Float::with_val(prec, radius);
    let factor = Float::with_val(prec, ln_radius_factor(radius, alpha, &plan.envelope)).exp();
    let screened = ScreenedSeries::new(f);
    let allowance_unit = pow2(prec, 40 - prec as i32);
    let rows = plan
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let later = plan.blocks[i + 1..].iter().fold(Float::new(prec), |acc, l| acc + &l.budget);
            let q = b.target.to_complex(prec);
            let extra: Vec<(usize, HighComplex)> =
                q.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(t, c)| (t, -c)).collect();
            let q_terms = CircleTerms::new(q.iter().enumerate(), &r, prec);
            let q_sup = sampled_sup(&q_terms, prec, samples);
            let image = screened.image_on_circle(w, b.position, &r, &extra);
            let delta = sampled_sup(&image, prec, samples);
            let allowance = Float::with_val(prec, &allowance_unit * q_sup.max(&Float::with_val(prec, 1)));
            let budget = later * &factor + allowance;
            HitRow { k: b.k, position: b.position, pass: delta <= budget, delta, budget }
        })
        .collect();
    HitReport { radius, rows }
}
