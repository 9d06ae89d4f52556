use rug::Float;

use super::{log_sum_exp, ConstructError, LogGrid, LogWeightsF64, TargetEnumeration, TargetPoly, DEFAULT_DMAX};
use crate::dunkl::{DunklWeights, ScreenedSeries};
use crate::growth::{rate_exponent, standard_grid, EnvelopeKind, RateEnvelope, RateKind};
use crate::means::{mean_p_fast, Exponent};
use crate::numeric::HighComplex;
use crate::series::circle::CircleTerms;
use crate::series::TruncatedSeries;

/// Relative size, in natural-log units, below which tail terms are dropped.
const TAIL_CUTOFF: f64 = 60.0;

#[derive(Clone, Debug)]
pub struct FhcConfig {
    pub dmax: usize,
    pub first_target: usize,
    pub targets: Option<Vec<TargetPoly>>,
    /// Block width `B`; chosen automatically when absent.
    pub block_width: Option<usize>,
    /// Radius on which scheduled hits are measured.
    pub hit_radius: f64,
    /// Hit tolerance; the automatic `B` keeps the later blocks below half
    /// of it on `|z| = hit_radius`.
    pub hit_tolerance: f64,
    /// Bound on the weighted norm of the whole series.
    pub norm_budget: f64,
    pub grid: Vec<Float>,
}

impl FhcConfig {
    pub fn new(prec: u32) -> Self {
        FhcConfig {
            dmax: DEFAULT_DMAX,
            first_target: 1,
            targets: None,
            block_width: None,
            hit_radius: 1.0,
            hit_tolerance: 0.1,
            norm_budget: 0.5,
            grid: standard_grid(prec),
        }
    }
}

/// Targets placed on the dyadic residue classes
/// `A_j = {m_0 + B (2^j k + 2^{j-1}) : k >= 0}`, `j = 1..J`.
#[derive(Clone, Debug, PartialEq)]
pub struct FhcSchedule {
    pub alpha: Float,
    pub p: Exponent,
    pub envelope: RateEnvelope,
    pub dmax: usize,
    pub block_width: usize,
    pub start: usize,
    /// Largest admissible placement, `trunc_degree - B`.
    pub max_position: usize,
    pub trunc_degree: usize,
    pub targets: Vec<(Option<usize>, TargetPoly)>,
}

impl FhcSchedule {
    pub fn n_targets(&self) -> usize {
        self.targets.len()
    }

    /// The class `j` (1-based) containing `n`, if `n` is a placement.
    pub fn class_of(&self, n: usize) -> Option<usize> {
        if n <= self.start || n > self.max_position || (n - self.start) % self.block_width != 0 {
            return None;
        }
        let s = (n - self.start) / self.block_width;
        let j = s.trailing_zeros() as usize + 1;
        (j <= self.targets.len()).then_some(j)
    }

    /// `1 / (B 2^j)`.
    pub fn nominal_density(&self, j: usize) -> f64 {
        1.0 / (self.block_width as f64 * 2f64.powi(j as i32))
    }

    /// All placements `(n, j)` in increasing order of `n`.
    pub fn placements(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut n = self.start + self.block_width;
        while n <= self.max_position {
            if let Some(j) = self.class_of(n) {
                out.push((n, j));
            }
            n += self.block_width;
        }
        out
    }

    /// Number of elements of `A_j` in `[1, n_max]`.
    pub fn count_in(&self, j: usize, n_max: usize) -> usize {
        self.placements().iter().filter(|&&(n, i)| i == j && n <= n_max).count()
    }

    pub fn check(&self) -> Result<(), ConstructError> {
        let max_deg = self.targets.iter().map(|(_, q)| q.degree()).max().unwrap_or(-1);
        if self.block_width == 0 || self.block_width as i64 <= max_deg {
            return Err(ConstructError::Parameter(format!(
                "block width {} must exceed the largest target degree {max_deg}",
                self.block_width
            )));
        }
        if self.max_position + self.block_width > self.trunc_degree {
            return Err(ConstructError::Parameter("placements exceed trunc_degree - B".into()));
        }
        Ok(())
    }

    /// `sum_j sum_{n in A_j} S^n Q_j`.
    pub fn assemble(&self, w: &DunklWeights) -> Result<TruncatedSeries, ConstructError> {
        self.check()?;
        let mut f = TruncatedSeries::zero(self.trunc_degree, w.precision());
        for (n, j) in self.placements() {
            for (i, c) in super::shifted_block(&self.targets[j - 1].1, n, w) {
                f.set_coeff(i, c)?;
            }
        }
        Ok(f)
    }
}

/// Conjugate of `max(p, 2)`, the exponent of the coefficient sums that
/// dominate `M_p` by the Hausdorff-Young inequality.
fn tail_q(p: Exponent) -> f64 {
    match p {
        Exponent::Infinity => 1.0,
        Exponent::Finite(p) => {
            let p = p.max(2.0);
            p / (p - 1.0)
        }
    }
}

/// Upper bound for the weighted norm
/// `sup_r M_p(g, r) r^a / (envelope(r) e^r)`, `a = alpha + 1/2 + 1/(2 max(2, p))`,
/// of the tail `g = sum_{n > N} S^n y`, taken over the standard grid.
///
/// Each monomial of `y` contributes `|b_t|` times the `l^q` norm of the
/// coefficients of `sum_{n>N} S^n z^t` on the circle, with `q` conjugate
/// to `max(2, p)`; by the Hausdorff-Young inequality this dominates the
/// `p`-mean of every finite partial sum, and the bound is nonincreasing in
/// `N`.
pub fn fuc_tail_norms(y: &TargetPoly, w: &DunklWeights, p: Exponent, env: &RateEnvelope, n: usize) -> Float {
    fuc_tail_norms_on(y, w, p, env, n, &standard_grid(w.precision()))
}

pub fn fuc_tail_norms_on(
    y: &TargetPoly,
    w: &DunklWeights,
    p: Exponent,
    env: &RateEnvelope,
    n: usize,
    grid: &[Float],
) -> Float {
    let prec = w.precision();
    let mut tail = TailNorms::new(w, p, env, grid);
    let ln = tail.ln_poly(y, n);
    if ln == f64::NEG_INFINITY {
        Float::new(prec)
    } else {
        Float::with_val(prec, ln).exp()
    }
}

/// Log-domain evaluation of the monomial tail norms.
struct TailNorms {
    q: f64,
    grid: LogGrid,
    r: Vec<f64>,
    alpha: f64,
    ld: LogWeightsF64,
}

impl TailNorms {
    fn new(w: &DunklWeights, p: Exponent, env: &RateEnvelope, grid: &[Float]) -> Self {
        let a = rate_exponent(p, &Float::with_val(53, w.alpha()), RateKind::FhcUpper).to_f64();
        TailNorms {
            q: tail_q(p),
            grid: LogGrid::new(grid, a, env),
            r: grid.iter().map(Float::to_f64).collect(),
            alpha: w.alpha().to_f64(),
            ld: LogWeightsF64::new(w),
        }
    }

    /// `ln` of the bound for `z^t`.
    fn ln_monomial(&mut self, t: usize, n_start: usize) -> f64 {
        let q = self.q;
        let ld_t = self.ld.get(t);
        let mut best = f64::NEG_INFINITY;
        for i in 0..self.r.len() {
            let (lr, lw, r) = (self.grid.ln_r[i], self.grid.ln_weight[i], self.r[i]);
            let past_peak = r + 2.0 * self.alpha.abs() + 3.0;
            let mut acc = f64::NEG_INFINITY;
            let mut prev = f64::NEG_INFINITY;
            let mut n = n_start + 1;
            loop {
                let s = n + t;
                let x = q * (ld_t + s as f64 * lr - self.ld.get(s));
                acc = if acc == f64::NEG_INFINITY { x } else { acc.max(x) + (-(acc - x).abs()).exp().ln_1p() };
                if s as f64 > past_peak && x < prev && x < acc - TAIL_CUTOFF {
                    break;
                }
                prev = x;
                n += 1;
            }
            best = best.max(lw + acc / q);
        }
        best
    }

    fn ln_poly(&mut self, y: &TargetPoly, n_start: usize) -> f64 {
        let parts: Vec<f64> = y
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| c.abs_f64().ln() + self.ln_monomial(t, n_start))
            .collect();
        log_sum_exp(parts)
    }

    fn ln_total(&mut self, targets: &[(Option<usize>, TargetPoly)], n_start: usize) -> f64 {
        let parts: Vec<f64> = targets.iter().map(|(_, q)| self.ln_poly(q, n_start)).collect();
        log_sum_exp(parts)
    }
}

/// `ln` of `sum_{s>=1} max_j sup_{|z|=R} |S^{sB} Q_j|` (triangle bound),
/// the most the later blocks can add to a scheduled hit.
fn ln_structural_tail(targets: &[(Option<usize>, TargetPoly)], b: usize, radius: f64, w: &DunklWeights) -> f64 {
    let ln_radius = radius.ln();
    let logs: Vec<Vec<(usize, f64)>> = targets.iter().map(|(_, q)| super::log_target(q, w)).collect();
    let mut terms = Vec::new();
    let mut s = 1;
    while s * b <= w.trunc_degree() {
        let g = s * b;
        let worst = logs
            .iter()
            .filter(|l| !l.is_empty() && l.iter().all(|(t, _)| g + t <= w.trunc_degree()))
            .map(|l| super::ln_shift_bound(l, g, ln_radius, w))
            .fold(f64::NEG_INFINITY, f64::max);
        terms.push(worst);
        s += 1;
    }
    log_sum_exp(terms)
}

/// Places `J` targets on the dyadic classes `A_j`.
///
/// The block width is the smallest `B` above every target degree for which
/// the later blocks add at most `hit_tolerance / 2` on `|z| = hit_radius` at
/// each scheduled position, unless given. The start `m_0` is the smallest
/// offset for which the tail bounds of [`fuc_tail_norms`] summed over all
/// target monomials stay within `norm_budget`.
pub fn build_frequently_hypercyclic(
    w: &DunklWeights,
    p: Exponent,
    env: &RateEnvelope,
    j_targets: usize,
    cfg: &FhcConfig,
) -> Result<(TruncatedSeries, FhcSchedule), ConstructError> {
    if j_targets == 0 {
        return Err(ConstructError::Parameter("at least one target is required".into()));
    }
    if env.kind() != EnvelopeKind::ToInfinity {
        return Err(ConstructError::Parameter(format!("envelope `{env}` does not tend to infinity")));
    }
    if !(cfg.hit_radius > 0.0 && cfg.hit_tolerance > 0.0 && cfg.norm_budget > 0.0) || cfg.grid.is_empty() {
        return Err(ConstructError::Parameter("hit radius, tolerance and norm budget must be positive".into()));
    }
    env.check_on(&cfg.grid)?;
    let trunc = w.trunc_degree();
    let targets: Vec<(Option<usize>, TargetPoly)> = match &cfg.targets {
        Some(t) => {
            if t.len() < j_targets {
                return Err(ConstructError::Parameter(format!("{} targets given, {j_targets} requested", t.len())));
            }
            t.iter().take(j_targets).map(|q| (None, q.clone())).collect()
        }
        None => {
            let e = TargetEnumeration::new(cfg.dmax);
            (0..j_targets).map(|i| (Some(cfg.first_target + i), e.target(cfg.first_target + i))).collect()
        }
    };
    let max_deg = targets.iter().map(|(_, q)| q.degree()).max().unwrap_or(-1);
    let min_width = (max_deg + 1).max(1) as usize;

    let block_width = match cfg.block_width {
        Some(b) if (b as i64) <= max_deg || b == 0 => {
            return Err(ConstructError::Parameter(format!(
                "block width {b} must exceed the largest target degree {max_deg}"
            )))
        }
        Some(b) => b,
        None => {
            let limit = (cfg.hit_tolerance / 2.0).ln();
            (min_width..=trunc / 2)
                .find(|&b| ln_structural_tail(&targets, b, cfg.hit_radius, w) <= limit)
                .ok_or_else(|| ConstructError::Infeasible {
                    achieved: 0,
                    message: "no block width keeps the scheduled hits within tolerance".into(),
                })?
        }
    };
    if block_width >= trunc {
        return Err(ConstructError::Infeasible { achieved: 0, message: "block width exceeds the truncation".into() });
    }
    let max_position = trunc - block_width;

    let mut tails = TailNorms::new(w, p, env, &cfg.grid);
    let ln_budget = cfg.norm_budget.ln();
    let (mut lo, mut hi) = (1usize, max_position);
    if tails.ln_total(&targets, hi) > ln_budget {
        return Err(ConstructError::Infeasible {
            achieved: 0,
            message: format!("no start offset below {max_position} meets the norm budget"),
        });
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if tails.ln_total(&targets, mid) <= ln_budget {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let start = lo;

    let placed = (1..=j_targets)
        .take_while(|&j| start + block_width * (1usize << (j - 1).min(62)) <= max_position)
        .count();
    if placed < j_targets {
        return Err(ConstructError::Infeasible {
            achieved: placed,
            message: format!("class A_{} has no element below {max_position}", placed + 1),
        });
    }

    let schedule = FhcSchedule {
        alpha: w.alpha().clone(),
        p,
        envelope: env.clone(),
        dmax: cfg.dmax,
        block_width,
        start,
        max_position,
        trunc_degree: trunc,
        targets,
    };
    let f = schedule.assemble(w)?;
    Ok((f, schedule))
}

#[derive(Clone, Debug)]
pub struct FrequencyRow {
    pub j: usize,
    pub target_index: Option<usize>,
    pub nominal: f64,
    /// Scheduled positions in `[1, N]`.
    pub scheduled: usize,
    pub hits: usize,
    pub empirical: f64,
}

#[derive(Clone, Debug)]
pub struct FrequencyReport {
    pub n_window: usize,
    pub eps: f64,
    pub radius: f64,
    pub rows: Vec<FrequencyRow>,
}

/// For each target of the schedule, the fraction of `n` in `[1, N]` with
/// `sup_{|z|=R} |Lambda^n f - Q_j| < eps`, next to the nominal density.
pub fn frequency_report(
    f: &TruncatedSeries,
    schedule: &FhcSchedule,
    w: &DunklWeights,
    n_window: usize,
    eps: f64,
    radius: f64,
    samples: usize,
) -> Result<FrequencyReport, ConstructError> {
    if n_window == 0 || n_window > schedule.max_position {
        return Err(ConstructError::Parameter(format!(
            "window {n_window} must lie in 1..={}",
            schedule.max_position
        )));
    }
    let targets: Vec<TargetPoly> = schedule.targets.iter().map(|(_, q)| q.clone()).collect();
    let hits = frequency_counts(f, &targets, w, n_window, eps, radius, samples);
    let rows = schedule
        .targets
        .iter()
        .enumerate()
        .map(|(i, (index, _))| FrequencyRow {
            j: i + 1,
            target_index: *index,
            nominal: schedule.nominal_density(i + 1),
            scheduled: schedule.count_in(i + 1, n_window),
            hits: hits[i],
            empirical: hits[i] as f64 / n_window as f64,
        })
        .collect();
    Ok(FrequencyReport { n_window, eps, radius, rows })
}

/// Number of `n` in `[1, N]` with `sup_{|z|=R} |Lambda^n f - Q| < eps`, for
/// each target `Q`.
pub fn frequency_counts(
    f: &TruncatedSeries,
    targets: &[TargetPoly],
    w: &DunklWeights,
    n_window: usize,
    eps: f64,
    radius: f64,
    samples: usize,
) -> Vec<usize> {
    let prec = w.precision();
    let r = Float::with_val(prec, radius);
    let screened = ScreenedSeries::new(f);
    let scaled_targets: Vec<Vec<(usize, HighComplex)>> = targets
        .iter()
        .map(|q| {
            let c = q.to_complex(prec);
            CircleTerms::new(c.iter().enumerate(), &r, prec)
                .terms()
                .iter()
                .map(|(t, v)| (*t, -v))
                .collect()
        })
        .collect();
    let eps = Float::with_val(prec, eps);
    let mut hits = vec![0usize; targets.len()];
    for n in 1..=n_window.min(f.trunc_degree()) {
        let image = screened.image_on_circle(w, n, &r, &[]);
        for (j, neg_q) in scaled_targets.iter().enumerate() {
            let diff = merge_terms(image.terms(), neg_q);
            let sup = if diff.is_empty() {
                Float::new(prec)
            } else {
                mean_p_fast(&CircleTerms::from_scaled(prec, diff), prec, Exponent::Infinity, Some(samples.max(1)))
            };
            if sup < eps {
                hits[j] += 1;
            }
        }
    }
    hits
}

fn merge_terms(a: &[(usize, HighComplex)], b: &[(usize, HighComplex)]) -> Vec<(usize, HighComplex)> {
    let mut out: Vec<(usize, HighComplex)> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push(b[j].clone());
            j += 1;
        } else {
            let mut s = a[i].1.clone();
            s += &b[j].1;
            if !s.is_zero() {
                out.push((a[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dunkl::apply_dunkl;
    use crate::growth::log_grid;
    use crate::numeric::relative_error;
    use rug::ops::Pow;

    const P: u32 = 128;

    fn cfg() -> FhcConfig {
        FhcConfig { grid: log_grid(0.01, 400.0, 64, P), ..FhcConfig::new(P) }
    }

    fn two() -> Exponent {
        Exponent::Finite(2.0)
    }

    #[test]
    fn zero_target_gives_zero() {
        let w = DunklWeights::from_f64(0.0, 256, P).unwrap();
        let (f, s) = build_frequently_hypercyclic(&w, two(), &RateEnvelope::LogGrowth, 1, &cfg()).unwrap();
        assert!(f.is_zero());
        let rep = frequency_report(&f, &s, &w, 64, 0.1, 1.0, 32).unwrap();
        assert_eq!(rep.rows[0].empirical, 1.0);
    }

    #[test]
    fn classes_are_disjoint_with_exact_densities() {
        let w = DunklWeights::from_f64(0.0, 4096, P).unwrap();
        let s = FhcSchedule {
            alpha: Float::new(P),
            p: two(),
            envelope: RateEnvelope::LogGrowth,
            dmax: 8,
            block_width: 3,
            start: 5,
            max_position: 4093,
            trunc_degree: 4096,
            targets: (0..4).map(|_| (None, TargetPoly::constant(1))).collect(),
        };
        let placements = s.placements();
        let mut seen = std::collections::HashSet::new();
        for (n, j) in &placements {
            assert!(seen.insert(*n));
            let k_part = (n - 5) / 3;
            assert_eq!((k_part - (1 << (j - 1))) % (1 << j), 0);
        }
        for j in 1..=4 {
            let n_max = 4000;
            let empirical = s.count_in(j, n_max) as f64 / n_max as f64;
            assert!((empirical - s.nominal_density(j)).abs() <= 2.0 * 3.0 / n_max as f64);
        }
        assert!(s.assemble(&w).is_ok());
    }

    #[test]
    fn closed_form_single_target() {
        let w = DunklWeights::from_f64(0.0, 1024, P).unwrap();
        let c = FhcConfig { first_target: 2, block_width: Some(2), ..cfg() };
        let (f, s) = build_frequently_hypercyclic(&w, two(), &RateEnvelope::LogGrowth, 1, &c).unwrap();
        assert_eq!(s.block_width, 2);
        for n in 0..=1024usize {
            let scheduled = n > s.start && (n - s.start) % 4 == 2 && n <= 1022;
            let c_n = &f.coeffs()[n];
            if scheduled {
                let expected = w.d(n).recip();
                assert!(relative_error(&c_n.re, &expected) < crate::numeric::pow2(P, 8 - P as i32), "n={n}");
            } else {
                assert!(c_n.is_zero(), "n={n}");
            }
        }
        // A scheduled power reproduces the target up to the later blocks.
        let (n, _) = s.placements()[3];
        let image = apply_dunkl(&f, &w, n);
        let one = Float::with_val(P, 1);
        assert!(relative_error(&image.coeffs()[0].re, &one) < 1e-30);
    }

    #[test]
    fn tail_norms_decrease_and_vanish_for_zero() {
        let w = DunklWeights::from_f64(0.0, 2048, P).unwrap();
        let grid = log_grid(0.01, 400.0, 64, P);
        let env = RateEnvelope::LogGrowth;
        assert!(fuc_tail_norms_on(&TargetPoly::zero(), &w, two(), &env, 5, &grid).is_zero());
        let one = TargetPoly::constant(1);
        let mut prev = fuc_tail_norms_on(&one, &w, two(), &env, 1, &grid);
        for n in [11, 21, 101, 301, 501] {
            let v = fuc_tail_norms_on(&one, &w, two(), &env, n, &grid);
            assert!(v < prev, "N={n}");
            prev = v;
        }
    }

    #[test]
    fn tail_norm_matches_direct_sum_at_p_two() {
        // With p = 2 the bound is Parseval's identity for the tail, which is
        // summed here term by term at full precision.
        let w = DunklWeights::from_f64(0.0, 512, P).unwrap();
        let env = RateEnvelope::LogGrowth;
        let grid = vec![Float::with_val(P, 30.0)];
        let n0 = 20;
        let got = fuc_tail_norms_on(&TargetPoly::constant(1), &w, two(), &env, n0, &grid);
        let r = Float::with_val(P, 30.0);
        let mut sum = Float::new(P);
        for n in n0 + 1..=512 {
            let term = Float::with_val(P, (&r).pow(n as u32)) / w.d(n);
            sum += term.square();
        }
        let a = rate_exponent(two(), &Float::new(P), RateKind::FhcUpper);
        let expected = sum.sqrt() * crate::growth::weight_factor(&r, &a, &env);
        assert!(relative_error(&got, &expected) < 1e-12);
    }

    #[test]
    fn unscheduled_target_is_never_hit() {
        let w = DunklWeights::from_f64(0.0, 1024, P).unwrap();
        let c = FhcConfig { first_target: 2, block_width: Some(2), ..cfg() };
        let (f, s) = build_frequently_hypercyclic(&w, two(), &RateEnvelope::LogGrowth, 1, &c).unwrap();
        let poly = TargetPoly::new(vec![
            super::super::GaussRational { re: 1.into(), im: 0.into() },
            super::super::GaussRational { re: 1.into(), im: 0.into() },
        ]);
        assert_eq!(frequency_counts(&f, &[poly], &w, 512, 1e-3, 1.0, 64), vec![0]);
        let rep = frequency_report(&f, &s, &w, 512, 0.1, 1.0, 64).unwrap();
        assert!(rep.rows[0].hits >= rep.rows[0].scheduled);
    }
}
