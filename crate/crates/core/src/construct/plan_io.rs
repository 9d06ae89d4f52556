use std::io::{BufRead, Write};

use rug::Float;

use super::{ConstructError, ConstructionPlan, FhcSchedule, PlanBlock, TargetEnumeration};
use crate::growth::RateEnvelope;
use crate::means::Exponent;
use crate::numeric::{format_exact, MIN_PRECISION};

pub const PLAN_MAGIC: &str = "dunklplan v1";

#[derive(Clone, Debug, PartialEq)]
pub enum PlanFile {
    Hc(ConstructionPlan),
    Fhc(FhcSchedule),
}

/// Writes an enumerated-target plan; plans with explicit targets have no
/// index to record and are rejected.
pub fn write_hc_plan<W: Write>(out: &mut W, plan: &ConstructionPlan) -> Result<(), ConstructError> {
    let indices = plan
        .blocks
        .iter()
        .map(|b| b.target_index.ok_or_else(|| no_index(b.k)))
        .collect::<Result<Vec<_>, _>>()?;
    writeln!(out, "{PLAN_MAGIC}")?;
    writeln!(out, "kind=hc")?;
    write_common(out, &plan.alpha, &plan.envelope, plan.dmax, plan.trunc_degree)?;
    writeln!(out, "hit_radius={}", plan.hit_radius)?;
    writeln!(out, "n_blocks={}", plan.blocks.len())?;
    for (b, index) in plan.blocks.iter().zip(indices) {
        writeln!(out, "{} {index} {} {} {}", b.k, b.position, format_exact(&b.budget), format_exact(&b.grid_norm))?;
    }
    Ok(())
}

pub fn write_fhc_schedule<W: Write>(out: &mut W, s: &FhcSchedule) -> Result<(), ConstructError> {
    let indices = s
        .targets
        .iter()
        .enumerate()
        .map(|(j, (i, _))| i.ok_or_else(|| no_index(j + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    writeln!(out, "{PLAN_MAGIC}")?;
    writeln!(out, "kind=fhc")?;
    write_common(out, &s.alpha, &s.envelope, s.dmax, s.trunc_degree)?;
    writeln!(out, "p={}", s.p)?;
    writeln!(out, "block_width={}", s.block_width)?;
    writeln!(out, "start={}", s.start)?;
    writeln!(out, "max_position={}", s.max_position)?;
    writeln!(out, "n_targets={}", s.targets.len())?;
    for (j, index) in indices.into_iter().enumerate() {
        writeln!(out, "{} {index} {}", j + 1, s.nominal_density(j + 1))?;
    }
    Ok(())
}

fn no_index(k: usize) -> ConstructError {
    ConstructError::Parameter(format!("target {k} is not from the enumeration and cannot be written"))
}

fn write_common<W: Write>(
    out: &mut W,
    alpha: &Float,
    env: &RateEnvelope,
    dmax: usize,
    trunc: usize,
) -> std::io::Result<()> {
    writeln!(out, "alpha={}", format_exact(alpha))?;
    writeln!(out, "precision_bits={}", alpha.prec())?;
    writeln!(out, "envelope={env}")?;
    writeln!(out, "dmax={dmax}")?;
    writeln!(out, "trunc_degree={trunc}")
}

struct Lines<R> {
    inner: std::iter::Enumerate<std::io::Lines<R>>,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self, what: &str) -> Result<(usize, String), ConstructError> {
        loop {
            match self.inner.next() {
                Some((i, Ok(l))) => {
                    let t = l.trim();
                    if !t.is_empty() {
                        return Ok((i + 1, t.to_string()));
                    }
                }
                Some((_, Err(e))) => return Err(e.into()),
                None => return Err(fmt_err(0, format!("missing {what}"))),
            }
        }
    }

    fn field(&mut self, key: &str) -> Result<(usize, String), ConstructError> {
        let (i, l) = self.next_line(key)?;
        match l.split_once('=') {
            Some((k, v)) if k.trim() == key => Ok((i, v.trim().to_string())),
            _ => Err(fmt_err(i, format!("expected `{key}=<value>`"))),
        }
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, ConstructError>
    where
        T::Err: std::fmt::Display,
    {
        let (i, v) = self.field(key)?;
        v.parse().map_err(|e| fmt_err(i, format!("{key}: {e}")))
    }
}

fn fmt_err(line: usize, message: String) -> ConstructError {
    ConstructError::Format { line, message }
}

fn parse_float(line: usize, text: &str, prec: u32) -> Result<Float, ConstructError> {
    Float::parse(text)
        .map(|p| Float::with_val(prec, p))
        .map_err(|e| fmt_err(line, format!("bad number `{text}`: {e}")))
}

/// Reads either kind of plan; targets are regenerated from the enumeration.
pub fn read_plan<R: BufRead>(input: R) -> Result<PlanFile, ConstructError> {
    let mut lines = Lines { inner: input.lines().enumerate() };
    let (i, magic) = lines.next_line("header")?;
    if magic != PLAN_MAGIC {
        return Err(fmt_err(i, format!("expected `{PLAN_MAGIC}`, found `{magic}`")));
    }
    let (ik, kind) = lines.field("kind")?;
    let (ia, alpha_text) = lines.field("alpha")?;
    let prec: u32 = lines.parsed("precision_bits")?;
    if prec < MIN_PRECISION {
        return Err(fmt_err(ia + 1, format!("precision_bits must be at least {MIN_PRECISION}")));
    }
    let alpha = parse_float(ia, &alpha_text, prec)?;
    let (ie, env_text) = lines.field("envelope")?;
    let envelope = RateEnvelope::parse(&env_text).map_err(|e| fmt_err(ie, e.to_string()))?;
    let dmax: usize = lines.parsed("dmax")?;
    let trunc_degree: usize = lines.parsed("trunc_degree")?;
    let targets = TargetEnumeration::new(dmax);
    match kind.as_str() {
        "hc" => {
            let hit_radius: f64 = lines.parsed("hit_radius")?;
            let n: usize = lines.parsed("n_blocks")?;
            let mut blocks = Vec::with_capacity(n);
            for _ in 0..n {
                let (i, l) = lines.next_line("block line")?;
                let parts: Vec<&str> = l.split_whitespace().collect();
                if parts.len() != 5 {
                    return Err(fmt_err(i, "expected `<k> <target_index> <position> <budget> <grid_norm>`".into()));
                }
                let int = |s: &str| s.parse::<usize>().map_err(|e| fmt_err(i, format!("`{s}`: {e}")));
                let (k, index, position) = (int(parts[0])?, int(parts[1])?, int(parts[2])?);
                if index == 0 {
                    return Err(fmt_err(i, "target indices start at 1".into()));
                }
                blocks.push(PlanBlock {
                    k,
                    target_index: Some(index),
                    target: targets.target(index),
                    position,
                    budget: parse_float(i, parts[3], prec)?,
                    grid_norm: parse_float(i, parts[4], prec)?,
                });
            }
            let plan = ConstructionPlan { alpha, envelope, dmax, hit_radius, trunc_degree, blocks };
            plan.check()?;
            Ok(PlanFile::Hc(plan))
        }
        "fhc" => {
            let (ip, p_text) = lines.field("p")?;
            let p = Exponent::parse(&p_text).map_err(|e| fmt_err(ip, e.to_string()))?;
            let block_width: usize = lines.parsed("block_width")?;
            let start: usize = lines.parsed("start")?;
            let max_position: usize = lines.parsed("max_position")?;
            let n: usize = lines.parsed("n_targets")?;
            let mut list = Vec::with_capacity(n);
            for j in 1..=n {
                let (i, l) = lines.next_line("target line")?;
                let parts: Vec<&str> = l.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != j.to_string() {
                    return Err(fmt_err(i, format!("expected `{j} <target_index> <density>`")));
                }
                let index: usize = parts[1].parse().map_err(|e| fmt_err(i, format!("target index: {e}")))?;
                if index == 0 {
                    return Err(fmt_err(i, "target indices start at 1".into()));
                }
                list.push((Some(index), targets.target(index)));
            }
            let s = FhcSchedule {
                alpha,
                p,
                envelope,
                dmax,
                block_width,
                start,
                max_position,
                trunc_degree,
                targets: list,
            };
            s.check()?;
            Ok(PlanFile::Fhc(s))
        }
        other => Err(fmt_err(ik, format!("unknown plan kind `{other}`"))),
    }
}
