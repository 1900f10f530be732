//! Sizing methods ranked under parametric cache workloads.
//!
//! Each method's hybrid plan is optimized once for the active workload and
//! then held fixed. Memory power blends active operation (switching plus
//! leakage at the active supply) with standby leakage at the method's own
//! retention voltage, weighted by the idle fraction, so every method's PAD
//! is affine in that fraction.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{row_power, PadBreakdown, SegmentPlan, WorkloadProfile};
use crate::cell::{preset_cell, upsize, SizingMethod};
use crate::error::{invalid, Error, Result};
use crate::noise::default_drv;
use crate::optimize::{optimize, OptimizerConfig};
use crate::report::fmt_num;
use crate::tech::{Technology, VthClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryConfig {
    /// Bits.
    pub capacity: usize,
    pub cells_per_row: usize,
    pub vdd_active: f64,
    /// Standby supply; each method's own DRV when unset.
    pub vdd_standby: Option<f64>,
}

impl MemoryConfig {
    /// A 32 kb single-block array with 256-cell rows at the active supply.
    pub fn new(tech: &Technology) -> Self {
        MemoryConfig { capacity: 32 * 1024, cells_per_row: 256, vdd_active: tech.vdd_active, vdd_standby: None }
    }

    pub fn rows(&self) -> usize {
        self.capacity / self.cells_per_row
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells_per_row == 0 || self.capacity == 0 || !self.capacity.is_multiple_of(self.cells_per_row) {
            return Err(invalid("capacity", "must be a positive multiple of cells_per_row"));
        }
        if !(self.vdd_active > 0.0) {
            return Err(invalid("vdd_active", "must be positive"));
        }
        if let Some(v) = self.vdd_standby {
            if !(v > 0.0 && v <= self.vdd_active) {
                return Err(invalid("vdd_standby", "must lie in (0, vdd_active]"));
            }
        }
        Ok(())
    }
}

/// Idle-independent figures of one method; PAD at any idle fraction
/// follows from these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodEvaluation {
    pub method: SizingMethod,
    pub plan: SegmentPlan,
    pub vdd_standby: f64,
    /// Switching power of the array while active, µW.
    pub dynamic_power: f64,
    /// Array leakage at the active supply, µW.
    pub active_leakage: f64,
    /// Array leakage at the standby supply, µW.
    pub standby_leakage: f64,
    pub area: f64,
    pub delay: f64,
    pub critical_cell_index: usize,
}

impl MethodEvaluation {
    pub fn breakdown(&self, idle_fraction: f64) -> PadBreakdown {
        let active = 1.0 - idle_fraction;
        let dynamic = active * self.dynamic_power;
        let leakage = active * self.active_leakage + idle_fraction * self.standby_leakage;
        PadBreakdown::new(dynamic, leakage, self.area, self.delay, self.critical_cell_index)
    }
}

/// Optimize the method's hybrid plan and collect its memory-level figures.
pub fn evaluate_method(
    mem: &MemoryConfig,
    tech: &Technology,
    workload: &WorkloadProfile,
    method: SizingMethod,
) -> Result<MethodEvaluation> {
    mem.validate()?;
    workload.validate()?;
    let active = WorkloadProfile { vdd: mem.vdd_active, idle_fraction: 0.0, ..*workload };
    let mut config = OptimizerConfig::new(tech, mem.cells_per_row);
    config.vdd = mem.vdd_active;
    config.workload = active;
    config.base_method = method;
    let result = optimize(&config, tech)?;

    let standby = match mem.vdd_standby {
        Some(v) => v,
        None => {
            // every cell flavor in the row has to retain its data
            let mut v: f64 = 0.0;
            for s in result.plan.segments() {
                let cell = upsize(&preset_cell(method, tech, VthClass::High)?.with_vth(s.vth), s.x)?;
                v = v.max(default_drv(&cell, tech)?);
            }
            v
        }
    };
    if standby > mem.vdd_active {
        return Err(Error::InfeasibleDesign(format!(
            "{method}: retention voltage {standby:.3} V exceeds the active supply {:.3} V",
            mem.vdd_active
        )));
    }
    let rows = mem.rows() as f64;
    let leak_only = |vdd: f64| WorkloadProfile { alpha: 0.0, vdd, idle_fraction: 0.0, ..active };
    let active_leak = row_power(&result.plan, &result.base, &leak_only(mem.vdd_active), tech)?;
    let standby_leak = row_power(&result.plan, &result.base, &leak_only(standby), tech)?;
    Ok(MethodEvaluation {
        method,
        plan: result.plan,
        vdd_standby: standby,
        dynamic_power: active.dynamic_power(),
        active_leakage: rows * active_leak,
        standby_leakage: rows * standby_leak,
        area: rows * result.breakdown.area,
        delay: result.breakdown.delay,
        critical_cell_index: result.breakdown.critical_cell_index,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub idle_fraction: f64,
    /// In the order the methods were given.
    pub entries: Vec<(SizingMethod, PadBreakdown)>,
    /// Ascending PAD.
    pub ranking: Vec<SizingMethod>,
    pub winner: SizingMethod,
}

fn rank(idle_fraction: f64, evals: &[MethodEvaluation]) -> ScenarioResult {
    let entries: Vec<(SizingMethod, PadBreakdown)> =
        evals.iter().map(|e| (e.method, e.breakdown(idle_fraction))).collect();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| entries[a].1.pad.total_cmp(&entries[b].1.pad).then(entries[a].0.cmp(&entries[b].0)));
    let ranking: Vec<SizingMethod> = order.iter().map(|&k| entries[k].0).collect();
    ScenarioResult { idle_fraction, winner: ranking[0], ranking, entries }
}

fn evaluate_all(
    mem: &MemoryConfig,
    tech: &Technology,
    workload: &WorkloadProfile,
    methods: &[SizingMethod],
) -> Result<Vec<MethodEvaluation>> {
    if methods.is_empty() {
        return Err(invalid("methods", "must not be empty"));
    }
    methods.par_iter().map(|&m| evaluate_method(mem, tech, workload, m)).collect()
}

/// Rank `methods` by memory PAD under `workload`.
pub fn evaluate_scenario(
    mem: &MemoryConfig,
    tech: &Technology,
    workload: &WorkloadProfile,
    methods: &[SizingMethod],
) -> Result<ScenarioResult> {
    let evals = evaluate_all(mem, tech, workload, methods)?;
    Ok(rank(workload.idle_fraction, &evals))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flip {
    /// Last grid point won by `from` and first won by `to`.
    pub interval: (f64, f64),
    pub from: SizingMethod,
    pub to: SizingMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverReport {
    pub points: Vec<ScenarioResult>,
    pub flips: Vec<Flip>,
}

impl CrossoverReport {
    /// Span from the first to the last change of winner; `None` if the
    /// winner never changes.
    pub fn crossover(&self) -> Option<(f64, f64)> {
        Some((self.flips.first()?.interval.0, self.flips.last()?.interval.1))
    }
}

/// Winner at each idle fraction of `grid` (plans optimized once).
pub fn sweep_idle_fraction(
    mem: &MemoryConfig,
    tech: &Technology,
    template: &WorkloadProfile,
    methods: &[SizingMethod],
    grid: &[f64],
) -> Result<CrossoverReport> {
    if grid.is_empty() {
        return Err(invalid("grid", "must not be empty"));
    }
    if grid.iter().any(|f| !(0.0..=1.0).contains(f)) {
        return Err(invalid("grid", "idle fractions must lie in [0, 1]"));
    }
    let evals = evaluate_all(mem, tech, template, methods)?;
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let points: Vec<ScenarioResult> = sorted.iter().map(|&f| rank(f, &evals)).collect();
    let flips = points
        .windows(2)
        .filter(|w| w[0].winner != w[1].winner)
        .map(|w| Flip { interval: (w[0].idle_fraction, w[1].idle_fraction), from: w[0].winner, to: w[1].winner })
        .collect();
    Ok(CrossoverReport { points, flips })
}

/// CSV with columns `method,power,area,delay,pad,rank`.
pub fn write_scenario_csv(result: &ScenarioResult, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "method,power,area,delay,pad,rank")?;
    for (method, b) in &result.entries {
        let r = result.ranking.iter().position(|m| m == method).expect("ranked") + 1;
        writeln!(out, "{method},{},{},{},{},{r}", fmt_num(b.power), fmt_num(b.area), fmt_num(b.delay), fmt_num(b.pad))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn small(tech: &Technology) -> MemoryConfig {
        MemoryConfig { capacity: 64 * 32, cells_per_row: 32, ..MemoryConfig::new(tech) }
    }

    #[test]
    fn single_method_wins_alone() {
        let t = presets::technology("ptm32").unwrap();
        let w = presets::workloads().get("hot").unwrap();
        let r = evaluate_scenario(&small(&t), &t, &w, &[SizingMethod::ReadBased]).unwrap();
        assert_eq!(r.ranking, vec![SizingMethod::ReadBased]);
        assert_eq!(r.winner, SizingMethod::ReadBased);
    }

    #[test]
    fn pad_is_affine_in_idle_fraction() {
        let t = presets::technology("ptm32").unwrap();
        let w = presets::workloads().get("hot").unwrap();
        let e = evaluate_method(&small(&t), &t, &w, SizingMethod::DrvBased).unwrap();
        let (a, b, c) = (e.breakdown(0.0).pad, e.breakdown(0.5).pad, e.breakdown(1.0).pad);
        assert!((b - 0.5 * (a + c)).abs() <= 1e-9 * a.max(c));
    }

    #[test]
    fn ranking_is_scale_free() {
        let t = presets::technology("ptm32").unwrap();
        let w = presets::workloads().get("hot").unwrap();
        let mem = small(&t);
        let evals = evaluate_all(&mem, &t, &w, &SizingMethod::ALL).unwrap();
        let a = rank(0.3, &evals);
        let scaled: Vec<MethodEvaluation> =
            evals.iter().map(|e| MethodEvaluation { area: e.area * 7.5, ..e.clone() }).collect();
        assert_eq!(rank(0.3, &scaled).ranking, a.ranking);
    }

    #[test]
    fn standby_above_active_is_rejected() {
        let t = presets::technology("ptm32").unwrap();
        let mut mem = small(&t);
        mem.vdd_active = 0.19;
        let w = presets::workloads().get("hot").unwrap();
        assert!(evaluate_method(&mem, &t, &w, SizingMethod::DrvBased).is_err());
    }
}
