//! PAD cost, the greedy hybrid assignment search, an exhaustive oracle and
//! the Monte-Carlo variation study.
//!
//! Search space shared by the greedy search and the oracle: the first
//! segment is nominal high-V_th with at least one cell; each further
//! segment has at least one cell and a spec `(x, vth)` with x not below the
//! previous segment's and different from it; a low-V_th segment ends the
//! row. With three segments this yields exactly the six assignment types
//! (1H), (1H,2H), (1H,2H,3H), (1H,1L), (1H,2L) and (1H,2H,3L).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{
    pad_breakdown, row_metrics, segment_cell, PadBreakdown, Segment, SegmentCell, SegmentPlan, SizeVersion,
    WorkloadProfile, MAX_SEGMENTS,
};
use crate::cell::{preset_cell, upsize, CellDesign, SizingMethod};
use crate::error::{invalid, Error, Result};
use crate::presets;
use crate::report::fmt_num;
use crate::tech::{Technology, VthClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintMode {
    /// Last cell no slower than the last nominal cell.
    RequireDdiffNonpositive,
    Unconstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PowerMode {
    /// Leakage recomputed for every plan.
    PerPlan,
    /// Power frozen at the all-nominal value, as in the closed form.
    FrozenPower,
}

/// Up-sizing grid `0, step, 2·step, ..., bound`, as fractions of W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XGrid {
    pub step: f64,
    pub bound: f64,
}

impl Default for XGrid {
    fn default() -> Self {
        XGrid { step: 0.05, bound: 1.0 }
    }
}

impl XGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(invalid("x_grid.step", "must be positive"));
        }
        if !(self.bound >= 0.0 && self.bound <= 1.0 + 1e-12) {
            return Err(invalid("x_grid.bound", "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Grid values in µm for layout width `w`.
    pub fn values(&self, w: f64) -> Vec<f64> {
        let steps = (self.bound / self.step + 1e-9).floor() as usize;
        // rounded so plans print as 0.12 rather than 0.12000000000000002
        (0..=steps).map(|k| ((k as f64 * self.step).min(self.bound) * w * 1e12).round() / 1e12).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub n_cells: usize,
    /// Maximum number of segments (size versions including nominal).
    pub max_sizes: usize,
    pub vth_set: Vec<VthClass>,
    pub x_grid: XGrid,
    pub vdd: f64,
    pub workload: WorkloadProfile,
    pub mirrored: bool,
    pub constraint_mode: ConstraintMode,
    pub power_mode: PowerMode,
    pub base_method: SizingMethod,
}

impl OptimizerConfig {
    /// Defaults: three sizes, dual V_th, 0.05·W grid, the `active` workload
    /// at the technology's active supply, D_diff constraint, per-plan power.
    pub fn new(tech: &Technology, n_cells: usize) -> Self {
        let mut workload = presets::workloads().get("active").expect("built-in active profile");
        workload.vdd = tech.vdd_active;
        OptimizerConfig {
            n_cells,
            max_sizes: 3,
            vth_set: vec![VthClass::High, VthClass::Low],
            x_grid: XGrid::default(),
            vdd: tech.vdd_active,
            workload,
            mirrored: false,
            constraint_mode: ConstraintMode::RequireDdiffNonpositive,
            power_mode: PowerMode::PerPlan,
            base_method: SizingMethod::DrvBased,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells == 0 {
            return Err(invalid("n_cells", "must be positive"));
        }
        if self.mirrored && !self.n_cells.is_multiple_of(2) {
            return Err(invalid("n_cells", "mirrored rows need an even cell count"));
        }
        if !(1..=MAX_SEGMENTS).contains(&self.max_sizes) {
            return Err(invalid("max_sizes", format!("{} not in 1..=3", self.max_sizes)));
        }
        if self.vth_set.is_empty() {
            return Err(invalid("vth_set", "must not be empty"));
        }
        if !(self.vdd > 0.0) {
            return Err(invalid("vdd", "must be positive"));
        }
        self.x_grid.validate()?;
        self.workload.validate()
    }

    fn half_len(&self) -> usize {
        if self.mirrored {
            self.n_cells / 2
        } else {
            self.n_cells
        }
    }

    fn allows(&self, v: VthClass) -> bool {
        self.vth_set.contains(&v)
    }
}

/// One iteration's best candidate for a given new-segment spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub plan: SegmentPlan,
    pub pad: f64,
    pub reduction_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelResult {
    pub plan: SegmentPlan,
    pub breakdown: PadBreakdown,
    pub reduction_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub plan: SegmentPlan,
    pub breakdown: PadBreakdown,
    pub baseline: PadBreakdown,
    pub reduction_pct: f64,
    pub trace: Vec<TraceRecord>,
    /// Best plan found per assignment label.
    pub by_label: BTreeMap<String, LabelResult>,
    /// Set when no candidate besides the baseline met the constraint.
    pub infeasible: bool,
    pub base: CellDesign,
    pub config: OptimizerConfig,
}

/// Table order of the six assignment types.
pub const ASSIGNMENT_LABELS: [&str; 6] =
    ["(1H,0,0)", "(1H,2H,0)", "(1H,2H,3H)", "(1H,1L,0)", "(1H,2L,0)", "(1H,2H,3L)"];

/// Power, area and worst-case delay of `plan` and their product.
pub fn pad_cost(
    plan: &SegmentPlan,
    base: &CellDesign,
    workload: &WorkloadProfile,
    tech: &Technology,
    vdd: f64,
) -> Result<PadBreakdown> {
    pad_breakdown(plan, base, workload, tech, vdd)
}

/// Closed-form cost of `N − n` nominal cells followed by `n` cells widened
/// by `x`, with power `p` fixed. Returns `(factored, expanded)`.
#[allow(clippy::too_many_arguments)]
pub fn pad_closed_form(w: f64, h: f64, n_cells: f64, n: f64, x: f64, p: f64, k: f64, d1: f64) -> (f64, f64) {
    let nn = n_cells;
    let factored = p * (nn * w * h + n * x * h) * (k * ((nn - n) * w).powi(2) + d1);
    let c3 = k * w * w * x;
    let c2 = k * w.powi(3) * nn - 2.0 * k * w * w * nn * x;
    let c1 = -2.0 * k * w.powi(3) * nn * nn + k * w * w * nn * nn * x + d1 * x;
    let c0 = k * w.powi(3) * nn.powi(3) + nn * w * d1;
    let expanded = p * h * (((c3 * n + c2) * n + c1) * n + c0);
    (factored, expanded)
}

/// Characterized spec table plus everything needed to cost a candidate.
struct Context {
    k_wl: f64,
    layout_h: f64,
    mirrored: bool,
    half: usize,
    dynamic: f64,
    constraint: ConstraintMode,
    power_mode: PowerMode,
    xs: Vec<f64>,
    /// Indexed by `x_idx * 2 + vth_rank`.
    cells: Vec<SegmentCell>,
    baseline: PadBreakdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Spec {
    x_idx: usize,
    vth: VthClass,
}

const ANCHOR: Spec = Spec { x_idx: 0, vth: VthClass::High };

fn vth_rank(v: VthClass) -> usize {
    match v {
        VthClass::High => 0,
        VthClass::Low => 1,
    }
}

impl Context {
    fn new(config: &OptimizerConfig, tech: &Technology, base: &CellDesign) -> Result<Self> {
        config.validate()?;
        let xs = config.x_grid.values(base.layout_w);
        let mut cells = Vec::with_capacity(xs.len() * 2);
        for &x in &xs {
            for v in VthClass::ALL {
                cells.push(segment_cell(base, tech, x, v, config.vdd, config.workload.vdd)?);
            }
        }
        let mut ctx = Context {
            k_wl: tech.k_wl,
            layout_h: base.layout_h,
            mirrored: config.mirrored,
            half: config.half_len(),
            dynamic: config.workload.dynamic_power(),
            constraint: config.constraint_mode,
            power_mode: PowerMode::PerPlan,
            xs,
            cells,
            baseline: PadBreakdown::new(0.0, 0.0, 1.0, 1.0, 1),
        };
        let half = ctx.half;
        ctx.baseline = ctx.evaluate(&[(half, ANCHOR)]).expect("single segment is always feasible");
        ctx.power_mode = config.power_mode;
        Ok(ctx)
    }

    fn cell(&self, s: Spec) -> SegmentCell {
        self.cells[s.x_idx * 2 + vth_rank(s.vth)]
    }

    /// `None` when the constraint rejects the candidate.
    fn evaluate(&self, segs: &[(usize, Spec)]) -> Option<PadBreakdown> {
        let mut cells = [SegmentCell { count: 0, width: 0.0, delay: 0.0, leakage: 0.0 }; MAX_SEGMENTS];
        for (slot, &(count, spec)) in cells.iter_mut().zip(segs) {
            *slot = SegmentCell { count, ..self.cell(spec) };
        }
        let m = row_metrics(&cells[..segs.len()], self.k_wl, self.layout_h, self.mirrored);
        if self.constraint == ConstraintMode::RequireDdiffNonpositive && segs.len() > 1 {
            let anchor = m.anchor_end_delay?;
            if m.last_delay - anchor > 0.0 {
                return None;
            }
        }
        Some(match self.power_mode {
            PowerMode::PerPlan => PadBreakdown::new(self.dynamic, m.leakage, m.area, m.delay, m.critical),
            PowerMode::FrozenPower => {
                let b = &self.baseline;
                PadBreakdown::with_power(b.power, b.dynamic_power, b.leakage_power, m.area, m.delay, m.critical)
            }
        })
    }

    fn plan(&self, segs: &[(usize, Spec)]) -> SegmentPlan {
        let mut out = Vec::with_capacity(segs.len());
        let mut upsized = 0;
        for &(count, spec) in segs {
            let size = if spec.x_idx == 0 {
                SizeVersion::Nominal
            } else {
                upsized += 1;
                if upsized == 1 {
                    SizeVersion::UpsizedI
                } else {
                    SizeVersion::UpsizedII
                }
            };
            out.push(Segment { count, size, x: self.xs[spec.x_idx], vth: spec.vth });
        }
        SegmentPlan::new(out, self.mirrored).expect("search only builds valid plans")
    }
}

/// A costed candidate with the deterministic tie-break order: lower PAD,
/// fewer up-sized cells, fewer cells in the newest segment, smaller x,
/// high-V_th first, then fewer cells in the middle segment.
#[derive(Debug, Clone)]
struct Candidate {
    segs: Vec<(usize, Spec)>,
    breakdown: PadBreakdown,
}

impl Candidate {
    fn key(&self) -> (f64, usize, usize, usize, usize, usize) {
        let upsized: usize = self.segs.iter().filter(|(_, s)| s.x_idx > 0).map(|(c, _)| *c).sum();
        let (n_new, last) = *self.segs.last().expect("non-empty");
        let mid = if self.segs.len() == 3 { self.segs[1].0 } else { 0 };
        (self.breakdown.pad, upsized, n_new, last.x_idx, vth_rank(last.vth), mid)
    }

    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.key(), other.key());
        a.0.total_cmp(&b.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
            .then(a.3.cmp(&b.3))
            .then(a.4.cmp(&b.4))
            .then(a.5.cmp(&b.5))
    }

    fn label(&self, ctx: &Context) -> String {
        ctx.plan(&self.segs).label()
    }
}

fn better(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.cmp(&a) == Ordering::Less { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

fn eval_candidate(ctx: &Context, segs: Vec<(usize, Spec)>) -> Option<Candidate> {
    ctx.evaluate(&segs).map(|breakdown| Candidate { segs, breakdown })
}

/// Specs allowed for the segment after one with spec `prev`.
fn next_specs(ctx: &Context, config: &OptimizerConfig, prev: Spec) -> Vec<Spec> {
    if prev.vth == VthClass::Low {
        return Vec::new();
    }
    let mut out = Vec::new();
    for x_idx in prev.x_idx..ctx.xs.len() {
        for vth in VthClass::ALL {
            let s = Spec { x_idx, vth };
            if config.allows(vth) && s != prev {
                out.push(s);
            }
        }
    }
    out
}

fn reduction(ctx: &Context, b: &PadBreakdown) -> f64 {
    100.0 * (1.0 - b.pad / ctx.baseline.pad)
}

fn base_cell(config: &OptimizerConfig, tech: &Technology) -> Result<CellDesign> {
    preset_cell(config.base_method, tech, VthClass::High)
}

/// Greedy hybrid assignment.
///
/// Iteration 1 searches the second segment's count, x and V_th
/// exhaustively. Iteration 2 starts from each high-V_th incumbent of
/// iteration 1 (one per x) and searches the third segment's spec together
/// with all segment boundaries. Low-V_th candidates are recorded but end
/// the row. The best candidate seen anywhere (the baseline included) is
/// returned.
pub fn optimize(config: &OptimizerConfig, tech: &Technology) -> Result<OptimizationResult> {
    let base = base_cell(config, tech)?;
    optimize_with_base(config, tech, &base)
}

pub fn optimize_with_base(
    config: &OptimizerConfig,
    tech: &Technology,
    base: &CellDesign,
) -> Result<OptimizationResult> {
    let ctx = Context::new(config, tech, base)?;
    let m = ctx.half;
    let baseline = Candidate { segs: vec![(m, ANCHOR)], breakdown: ctx.baseline };
    let mut seen: Vec<(usize, Candidate)> = Vec::new();

    if config.max_sizes >= 2 && m >= 2 {
        let specs = next_specs(&ctx, config, ANCHOR);
        let per_spec: Vec<Option<Candidate>> = specs
            .par_iter()
            .map(|&s| (1..m).map(|n| eval_candidate(&ctx, vec![(m - n, ANCHOR), (n, s)])).fold(None, better))
            .collect();
        let mut highs: Vec<Spec> = Vec::new();
        for c in per_spec.into_iter().flatten() {
            let s = c.segs[1].1;
            if s.vth == VthClass::High {
                highs.push(s);
            }
            seen.push((1, c));
        }

        if config.max_sizes >= 3 && m >= 3 {
            let pairs: Vec<(Spec, Spec)> =
                highs.iter().flat_map(|&s1| next_specs(&ctx, config, s1).into_iter().map(move |s2| (s1, s2))).collect();
            let per_pair: Vec<Option<Candidate>> = pairs
                .par_iter()
                .map(|&(s1, s2)| {
                    let mut best = None;
                    for c0 in 1..m - 1 {
                        for n1 in 1..m - c0 {
                            let n2 = m - c0 - n1;
                            best = better(best, eval_candidate(&ctx, vec![(c0, ANCHOR), (n1, s1), (n2, s2)]));
                        }
                    }
                    best
                })
                .collect();
            seen.extend(per_pair.into_iter().flatten().map(|c| (2, c)));
        }
    }

    finish(config, tech, base, &ctx, baseline, seen, true)
}

fn finish(
    config: &OptimizerConfig,
    tech: &Technology,
    base: &CellDesign,
    ctx: &Context,
    baseline: Candidate,
    seen: Vec<(usize, Candidate)>,
    keep_trace: bool,
) -> Result<OptimizationResult> {
    let infeasible = config.max_sizes > 1 && seen.is_empty();
    let mut by_label_cand: BTreeMap<String, Candidate> = BTreeMap::new();
    by_label_cand.insert(baseline.label(ctx), baseline.clone());
    let mut best = baseline.clone();
    let mut trace = Vec::new();
    for (iteration, c) in &seen {
        let label = c.label(ctx);
        let slot = by_label_cand.entry(label).or_insert_with(|| c.clone());
        if c.cmp(slot) == Ordering::Less {
            *slot = c.clone();
        }
        if c.cmp(&best) == Ordering::Less {
            best = c.clone();
        }
        if keep_trace {
            trace.push(TraceRecord {
                iteration: *iteration,
                plan: ctx.plan(&c.segs),
                pad: c.breakdown.pad,
                reduction_pct: reduction(ctx, &c.breakdown),
            });
        }
    }
    let canonical = |c: &Candidate| -> Result<(SegmentPlan, PadBreakdown)> {
        let plan = ctx.plan(&c.segs);
        let mut b = pad_cost(&plan, base, &config.workload, tech, config.vdd)?;
        if config.power_mode == PowerMode::FrozenPower {
            let p = &ctx.baseline;
            b = PadBreakdown::with_power(
                p.power,
                p.dynamic_power,
                p.leakage_power,
                b.area,
                b.delay,
                b.critical_cell_index,
            );
        }
        Ok((plan, b))
    };
    let (_, baseline_bd) = canonical(&baseline)?;
    let (plan, breakdown) = canonical(&best)?;
    let mut by_label = BTreeMap::new();
    for (label, c) in by_label_cand {
        let (plan, b) = canonical(&c)?;
        let r = 100.0 * (1.0 - b.pad / baseline_bd.pad);
        by_label.insert(label, LabelResult { plan, breakdown: b, reduction_pct: r });
    }
    Ok(OptimizationResult {
        reduction_pct: 100.0 * (1.0 - breakdown.pad / baseline_bd.pad),
        plan,
        breakdown,
        baseline: baseline_bd,
        trace,
        by_label,
        infeasible,
        base: *base,
        config: config.clone(),
    })
}

/// Largest search the oracle accepts.
pub const ORACLE_LIMIT: u128 = 50_000_000;

/// Number of plans the oracle would enumerate for `config`.
pub fn oracle_cardinality(config: &OptimizerConfig, grid_len: usize) -> u128 {
    let m = config.half_len() as u128;
    let g = grid_len as u128;
    let nv = config.vth_set.len() as u128;
    let mut total = 1u128;
    if config.max_sizes >= 2 && m >= 2 {
        total += (g * nv - u128::from(config.allows(VthClass::High))) * (m - 1);
    }
    if config.max_sizes >= 3 && m >= 3 && config.allows(VthClass::High) {
        let boundaries = (m - 1) * (m - 2) / 2;
        let mut pairs = 0u128;
        for x1 in 1..g {
            // specs at x2 >= x1 excluding (x1, High)
            pairs += (g - x1) * nv - 1;
        }
        total += pairs * boundaries;
    }
    total
}

/// Exhaustive search over the same space as [`optimize`].
pub fn brute_force_oracle(config: &OptimizerConfig, tech: &Technology) -> Result<OptimizationResult> {
    config.validate()?;
    let base = base_cell(config, tech)?;
    let grid_len = config.x_grid.values(base.layout_w).len();
    let cardinality = oracle_cardinality(config, grid_len);
    if config.half_len() > 64 || cardinality > ORACLE_LIMIT {
        return Err(Error::SearchSpaceTooLarge { cardinality, limit: ORACLE_LIMIT });
    }
    let ctx = Context::new(config, tech, &base)?;
    let m = ctx.half;
    let baseline = Candidate { segs: vec![(m, ANCHOR)], breakdown: ctx.baseline };

    let specs: Vec<Spec> = (0..ctx.xs.len())
        .flat_map(|x_idx| VthClass::ALL.into_iter().map(move |vth| Spec { x_idx, vth }))
        .filter(|s| config.allows(s.vth))
        .collect();
    let mut plans: Vec<Vec<(usize, Spec)>> = Vec::new();
    if config.max_sizes >= 2 {
        for &s1 in specs.iter().filter(|&&s| s != ANCHOR) {
            for c0 in 1..m {
                plans.push(vec![(c0, ANCHOR), (m - c0, s1)]);
            }
        }
    }
    let mut triples = Vec::new();
    if config.max_sizes >= 3 {
        for &s1 in &specs {
            if s1 == ANCHOR || s1.vth == VthClass::Low {
                continue;
            }
            for &s2 in &specs {
                if s2.x_idx < s1.x_idx || s2 == s1 {
                    continue;
                }
                triples.push((s1, s2));
            }
        }
    }
    let best2 = plans.par_iter().map(|segs| eval_candidate(&ctx, segs.clone())).reduce(|| None, better);
    let best3 = triples
        .par_iter()
        .map(|&(s1, s2)| {
            let mut best = None;
            for c0 in 1..m {
                for n1 in 1..m - c0 {
                    let n2 = m - c0 - n1;
                    best = better(best, eval_candidate(&ctx, vec![(c0, ANCHOR), (n1, s1), (n2, s2)]));
                }
            }
            best
        })
        .reduce(|| None, better);
    let seen: Vec<(usize, Candidate)> = [best2, best3].into_iter().flatten().map(|c| (0, c)).collect();
    finish(config, tech, &base, &ctx, baseline, seen, false)
}

/// One point of the closed-form PAD curve family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// x as a fraction of W.
    pub x_frac: f64,
    pub n: usize,
    pub pad: f64,
    /// PAD relative to n = 0.
    pub normalized: f64,
}

/// Closed-form PAD(n) for each x (fraction of W), using the technology's
/// wordline constant, the base cell's d₁ and the all-nominal power.
pub fn pad_curve(config: &OptimizerConfig, tech: &Technology, x_fracs: &[f64]) -> Result<Vec<CurvePoint>> {
    config.validate()?;
    let base = base_cell(config, tech)?;
    let plan = SegmentPlan::baseline(config.n_cells, false)?;
    let p = pad_cost(&plan, &base, &config.workload, tech, config.vdd)?.power;
    let d1 = crate::cell::intrinsic_delay(&base, tech, config.vdd)?;
    let (w, h, nn) = (base.layout_w, base.layout_h, config.n_cells as f64);
    let mut out = Vec::new();
    for &xf in x_fracs {
        if !(0.0..=1.0).contains(&xf) {
            return Err(invalid("x", format!("{xf} outside [0, 1]")));
        }
        let f0 = pad_closed_form(w, h, nn, 0.0, xf * w, p, tech.k_wl, d1).0;
        for n in 0..=config.n_cells {
            let f = pad_closed_form(w, h, nn, n as f64, xf * w, p, tech.k_wl, d1).0;
            out.push(CurvePoint { x_frac: xf, n, pad: f, normalized: f / f0 });
        }
    }
    Ok(out)
}

pub fn write_curve_csv(points: &[CurvePoint], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "x_frac,n,pad,normalized")?;
    for p in points {
        writeln!(out, "{},{},{},{}", fmt_num(p.x_frac), p.n, fmt_num(p.pad), fmt_num(p.normalized))?;
    }
    Ok(())
}

/// Table-style CSV: one row per assignment type found.
pub fn write_table_csv(result: &OptimizationResult, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "assignment,count1,count2,count3,x1,x2,power,area,delay,pad,reduction_pct")?;
    for label in ASSIGNMENT_LABELS {
        let Some(r) = result.by_label.get(label) else { continue };
        let segs = r.plan.segments();
        let count = |k: usize| segs.get(k).map_or(0, |s| s.count);
        let x = |v: SizeVersion| segs.iter().find(|s| s.size == v).map_or(0.0, |s| s.x);
        let b = &r.breakdown;
        writeln!(
            out,
            "\"{label}\",{},{},{},{},{},{},{},{},{},{}",
            count(0),
            count(1),
            count(2),
            fmt_num(x(SizeVersion::UpsizedI)),
            fmt_num(x(SizeVersion::UpsizedII)),
            fmt_num(b.power),
            fmt_num(b.area),
            fmt_num(b.delay),
            fmt_num(b.pad),
            fmt_num(r.reduction_pct),
        )?;
    }
    Ok(())
}

/// Line-oriented log of every candidate the greedy search kept.
pub fn write_trace(result: &OptimizationResult, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "baseline {} pad={}",
        SegmentPlan::baseline(result.config.n_cells, result.config.mirrored).map(|p| p.to_string()).unwrap_or_default(),
        fmt_num(result.baseline.pad)
    )?;
    for t in &result.trace {
        writeln!(
            out,
            "iter={} plan={} pad={} reduction={}",
            t.iteration,
            t.plan,
            fmt_num(t.pad),
            fmt_num(t.reduction_pct)
        )?;
    }
    writeln!(
        out,
        "best {} pad={} reduction={}",
        result.plan,
        fmt_num(result.breakdown.pad),
        fmt_num(result.reduction_pct)
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationSummary {
    pub nominal_pct: f64,
    pub mean_pct: f64,
    pub min_pct: f64,
    pub max_pct: f64,
    pub trials: usize,
    pub sigma_pct: f64,
    pub seed: u64,
}

/// Monte-Carlo robustness of an optimized plan.
///
/// Every physical cell gets an independent uniform ±sigma relative shift
/// of its thresholds and of its transistor widths; the same draws are
/// applied to the plan and to the baseline so each trial compares like with
/// like. Trial `t` uses a generator seeded with `seed + t`.
pub fn variation_analysis(
    result: &OptimizationResult,
    tech: &Technology,
    sigma_pct: f64,
    trials: usize,
    seed: u64,
) -> Result<VariationSummary> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    if !(sigma_pct >= 0.0) || sigma_pct >= 100.0 {
        return Err(invalid("sigma_pct", "must lie in [0, 100)"));
    }
    let cfg = &result.config;
    let base = &result.base;
    let retention = tech.retention_floor();
    if !(cfg.vdd > retention) {
        return Err(Error::InoperableVoltage { vdd: cfg.vdd, retention });
    }
    let baseline_plan = SegmentPlan::baseline(cfg.n_cells, cfg.mirrored)?;
    let sigma = sigma_pct / 100.0;
    let plan_cells = physical_cells(&result.plan, base)?;
    let base_cells = physical_cells(&baseline_plan, base)?;
    let frozen_power = (cfg.power_mode == PowerMode::FrozenPower).then_some(result.baseline.power);

    let reductions: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
            let draws: Vec<(f64, f64)> = (0..cfg.n_cells)
                .map(|_| {
                    if sigma == 0.0 {
                        (0.0, 0.0)
                    } else {
                        (rng.gen_range(-sigma..=sigma), rng.gen_range(-sigma..=sigma))
                    }
                })
                .collect();
            let a = perturbed_pad(&plan_cells, &draws, tech, cfg, result.breakdown.area, frozen_power);
            let b = perturbed_pad(&base_cells, &draws, tech, cfg, result.baseline.area, frozen_power);
            100.0 * (1.0 - a / b)
        })
        .collect();
    let mean = reductions.iter().sum::<f64>() / trials as f64;
    let min = reductions.iter().copied().fold(f64::INFINITY, f64::min);
    let max = reductions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(VariationSummary {
        nominal_pct: result.reduction_pct,
        mean_pct: mean,
        min_pct: min,
        max_pct: max,
        trials,
        sigma_pct,
        seed,
    })
}

struct PhysicalCell {
    position: f64,
    cell: CellDesign,
}

fn physical_cells(plan: &SegmentPlan, base: &CellDesign) -> Result<Vec<PhysicalCell>> {
    let mut cells = Vec::with_capacity(plan.n_total());
    for i in 1..=plan.n_total() {
        let position = crate::array::cell_position(plan, base, i)?;
        let j = if plan.mirrored() && i > plan.n_total() / 2 { plan.n_total() + 1 - i } else { i };
        let mut start = 0;
        let mut seg = &plan.segments()[0];
        for s in plan.segments() {
            seg = s;
            if j <= start + s.count {
                break;
            }
            start += s.count;
        }
        let cell = upsize(&base.with_vth(seg.vth), seg.x)?;
        cells.push(PhysicalCell { position, cell });
    }
    Ok(cells)
}

fn perturbed_pad(
    cells: &[PhysicalCell],
    draws: &[(f64, f64)],
    tech: &Technology,
    cfg: &OptimizerConfig,
    area: f64,
    frozen_power: Option<f64>,
) -> f64 {
    let mut leak = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for (c, &(dv, dw)) in cells.iter().zip(draws) {
        let vth = tech.vth.get(c.cell.vth_class);
        let half = c.cell.half_cell(tech).shift_vth(vth.n * dv, vth.p * dv).scale_widths(1.0 + dw);
        let d = tech.k_wl * c.position * c.position + half.read_delay(tech, cfg.vdd);
        worst = worst.max(d);
        leak += half.leakage_power(tech, cfg.workload.vdd);
    }
    let power = frozen_power.unwrap_or(cfg.workload.dynamic_power() + leak);
    power * area * worst
}
