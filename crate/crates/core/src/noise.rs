//! Butterfly curves, static noise margins, write margin, DRV and W/L sweeps.
//!
//! The SNM is read off in a frame rotated by 45°: with `u = (x - y)/√2`
//! and `w = (x + y)/√2` both VTCs become single-valued in `u`, and the side
//! of the largest axis-aligned square in a lobe is `max |Δw| / √2`.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cell::{CellDesign, HalfCell};
use crate::error::{invalid, Error, Result};
use crate::report::fmt_num;
use crate::tech::Technology;

const SAMPLE_STEP: f64 = 0.002;
const REFINE_TOL: f64 = 1e-4;
const BISECT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SnmMode {
    Hold,
    Read,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnmResult {
    pub snm: f64,
    pub lobe_a: f64,
    pub lobe_b: f64,
    /// (v_q, v_qb) samples of the right inverter driven by the left node.
    pub vtc_forward: Vec<(f64, f64)>,
    /// (v_q, v_qb) samples of the left inverter driven by the right node.
    pub vtc_mirror: Vec<(f64, f64)>,
}

/// Output of one inverter of the cell for input `vin`.
///
/// In read mode the access device pulls the output toward a bitline held at
/// `v_bl` with the wordline at `vdd`; the access current can flow either way.
fn vtc_point(tech: &Technology, half: &HalfCell, vdd: f64, vin: f64, access_bl: Option<f64>) -> Result<f64> {
    let balance = |vout: f64| {
        let mut i = half.i_pull_up(tech, vdd - vin, vdd - vout) - half.i_pull_down(tech, vin, vout);
        if let Some(v_bl) = access_bl {
            i += if v_bl >= vout {
                half.i_access(tech, vdd - vout, v_bl - vout)
            } else {
                -half.i_access(tech, vdd - v_bl, vout - v_bl)
            };
        }
        i
    };
    let (mut lo, mut hi) = (0.0, vdd);
    let (f_lo, f_hi) = (balance(lo), balance(hi));
    if !f_lo.is_finite() || !f_hi.is_finite() || f_lo < 0.0 || f_hi > 0.0 {
        return Err(Error::NumericalFailure { vin });
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        let f = balance(mid);
        if !f.is_finite() {
            return Err(Error::NumericalFailure { vin });
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

struct Curve<'a> {
    tech: &'a Technology,
    half: HalfCell,
    vdd: f64,
    access_bl: Option<f64>,
}

impl Curve<'_> {
    fn eval(&self, vin: f64) -> Result<f64> {
        vtc_point(self.tech, &self.half, self.vdd, vin, self.access_bl)
    }

    /// Rotated coordinate w at rotated abscissa `u`, for the curve drawn as
    /// (vin, vout) when `swap` is false and (vout, vin) when true.
    fn w_at(&self, u: f64, swap: bool) -> Result<f64> {
        // along the curve, x - y is monotone in vin (increasing unless swapped)
        let target = u * std::f64::consts::SQRT_2;
        let (mut lo, mut hi) = (0.0, self.vdd);
        let mut out = (0.0, 0.0);
        for _ in 0..48 {
            let vin = 0.5 * (lo + hi);
            let vout = self.eval(vin)?;
            let (x, y) = if swap { (vout, vin) } else { (vin, vout) };
            out = (x, y);
            let d = x - y;
            if (d < target) != swap {
                lo = vin;
            } else {
                hi = vin;
            }
        }
        Ok((out.0 + out.1) / std::f64::consts::SQRT_2)
    }
}

/// Butterfly of a cell with identical halves.
pub fn butterfly(cell: &CellDesign, tech: &Technology, vdd: f64, mode: SnmMode) -> Result<SnmResult> {
    let half = cell.half_cell(tech);
    butterfly_halves(tech, &half, &half, vdd, mode)
}

/// Butterfly of a cell whose halves may differ (e.g. under mismatch).
pub fn butterfly_halves(
    tech: &Technology,
    left: &HalfCell,
    right: &HalfCell,
    vdd: f64,
    mode: SnmMode,
) -> Result<SnmResult> {
    if !vdd.is_finite() || vdd < 0.0 {
        return Err(invalid("vdd", format!("{vdd} must be non-negative")));
    }
    if vdd == 0.0 {
        return Ok(SnmResult {
            snm: 0.0,
            lobe_a: 0.0,
            lobe_b: 0.0,
            vtc_forward: vec![(0.0, 0.0)],
            vtc_mirror: vec![(0.0, 0.0)],
        });
    }
    let bl = match mode {
        SnmMode::Hold => None,
        SnmMode::Read => Some(vdd),
    };
    let fwd = Curve { tech, half: *right, vdd, access_bl: bl };
    let mir = Curve { tech, half: *left, vdd, access_bl: bl };
    let steps = (vdd / SAMPLE_STEP).ceil().max(8.0) as usize;
    let mut vtc_forward = Vec::with_capacity(steps + 1);
    let mut vtc_mirror = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let v = vdd * k as f64 / steps as f64;
        vtc_forward.push((v, fwd.eval(v)?));
        vtc_mirror.push((mir.eval(v)?, v));
    }
    let (lobe_a, lobe_b) = extract_lobes(&vtc_forward, &vtc_mirror, |u| Ok(fwd.w_at(u, false)? - mir.w_at(u, true)?))?;
    Ok(SnmResult { snm: lobe_a.min(lobe_b), lobe_a, lobe_b, vtc_forward, vtc_mirror })
}

fn rotate(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut r: Vec<(f64, f64)> = points.iter().map(|&(x, y)| ((x - y) * s, (x + y) * s)).collect();
    r.sort_by(|a, b| a.0.total_cmp(&b.0));
    r
}

fn interp(curve: &[(f64, f64)], u: f64) -> f64 {
    let k = curve.partition_point(|p| p.0 < u);
    if k == 0 {
        return curve[0].1;
    }
    if k == curve.len() {
        return curve[k - 1].1;
    }
    let (a, b) = (curve[k - 1], curve[k]);
    if b.0 - a.0 <= 0.0 {
        return a.1;
    }
    a.1 + (b.1 - a.1) * (u - a.0) / (b.0 - a.0)
}

/// Largest-square sides of the two lobes, given sampled curves and an exact
/// rotated-gap evaluator for refinement.
fn extract_lobes(
    curve_a: &[(f64, f64)],
    curve_b: &[(f64, f64)],
    exact_gap: impl Fn(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    let ra = rotate(curve_a);
    let rb = rotate(curve_b);
    let u_lo = ra[0].0.max(rb[0].0);
    let u_hi = ra[ra.len() - 1].0.min(rb[rb.len() - 1].0);
    if !(u_hi > u_lo) {
        return Ok((0.0, 0.0));
    }
    let step = SAMPLE_STEP * std::f64::consts::FRAC_1_SQRT_2;
    let n = ((u_hi - u_lo) / step).ceil().max(2.0) as usize;
    let us: Vec<f64> = (0..=n).map(|k| u_lo + (u_hi - u_lo) * k as f64 / n as f64).collect();
    let gaps: Vec<f64> = us.iter().map(|&u| interp(&ra, u) - interp(&rb, u)).collect();

    // sign changes of the gap are the cell's fixed points
    let mut crossings = Vec::new();
    for k in 1..gaps.len() {
        if (gaps[k - 1] > 0.0) != (gaps[k] > 0.0) {
            crossings.push(k);
        }
    }
    if crossings.len() < 3 {
        return Ok((0.0, 0.0));
    }
    // lobes flank the metastable point, the median crossing
    let mid = crossings.len() / 2;
    let lobe = |from: usize, to: usize| -> Result<f64> {
        let mut best = from;
        for k in from..to {
            if gaps[k].abs() > gaps[best].abs() {
                best = k;
            }
        }
        let a = us[best.saturating_sub(1).max(from.saturating_sub(1))];
        let b = us[(best + 1).min(us.len() - 1)];
        let g = golden_max(a, b, |u| Ok(exact_gap(u)?.abs()))?;
        Ok(g.max(gaps[best].abs()) * std::f64::consts::FRAC_1_SQRT_2)
    };
    let left = lobe(crossings[mid - 1], crossings[mid])?;
    let right = lobe(crossings[mid], crossings[mid + 1])?;
    Ok((left, right))
}

fn golden_max(mut a: f64, mut b: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > REFINE_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(fc.max(fd))
}

pub fn hold_snm(cell: &CellDesign, tech: &Technology, vdd: f64) -> Result<f64> {
    Ok(butterfly(cell, tech, vdd, SnmMode::Hold)?.snm)
}

pub fn read_snm(cell: &CellDesign, tech: &Technology, vdd: f64) -> Result<f64> {
    Ok(butterfly(cell, tech, vdd, SnmMode::Read)?.snm)
}

/// Whether the cell, storing Q = 1, ends up with Q low when the Q-side
/// bitline is held at `v_bl` and the other bitline at `vdd`.
fn flips(tech: &Technology, half: &HalfCell, vdd: f64, v_bl: f64) -> Result<bool> {
    let q_side = Curve { tech, half: *half, vdd, access_bl: Some(v_bl) };
    let qb_side = Curve { tech, half: *half, vdd, access_bl: Some(vdd) };
    // G(q) = Q-side(QB-side(q)) is increasing; its largest fixed point is the
    // state the cell settles to when started from Q = vdd.
    let g = |q: f64| -> Result<f64> { q_side.eval(qb_side.eval(q)?) };
    let steps = (vdd / SAMPLE_STEP).ceil().max(8.0) as usize;
    let mut q = vdd;
    for k in (0..=steps).rev() {
        q = vdd * k as f64 / steps as f64;
        if g(q)? >= q {
            break;
        }
    }
    let qb = qb_side.eval(q)?;
    Ok(q < qb)
}

/// Write margin: the highest bitline voltage that still flips the cell with
/// the wordline at `vdd`, i.e. `vdd` minus the smallest flipping bitline
/// differential. Zero when the cell cannot be written at all.
pub fn write_margin(cell: &CellDesign, tech: &Technology, vdd: f64) -> Result<f64> {
    if !(vdd > 0.0) {
        return Ok(0.0);
    }
    let half = cell.half_cell(tech);
    if !flips(tech, &half, vdd, 0.0)? {
        return Ok(0.0);
    }
    if flips(tech, &half, vdd, vdd)? {
        return Ok(vdd);
    }
    let (mut lo, mut hi) = (0.0, vdd);
    while hi - lo > REFINE_TOL {
        let mid = 0.5 * (lo + hi);
        if flips(tech, &half, vdd, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Smallest supply (to 1 mV) at which `metric(vdd) >= target`, assuming the
/// metric is nondecreasing in vdd.
fn bisect_supply(tech: &Technology, target: f64, what: &str, metric: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let top = tech.vdd_nominal;
    if metric(top)? < target {
        return Err(Error::InfeasibleDesign(format!("{what} stays below {:.1} mV up to {top} V", target * 1e3)));
    }
    let (mut lo, mut hi) = (0.0, top);
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        if metric(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn guarded(tech: &Technology, v_star: f64) -> f64 {
    v_star.max(tech.thermal_noise_floor) + tech.variation_margin + tech.guard_band
}

/// Lowest supply at which hold SNM reaches `snm_min`, before margins.
pub fn retention_voltage(cell: &CellDesign, tech: &Technology, snm_min: f64) -> Result<f64> {
    if !(snm_min > 0.0) {
        return Err(invalid("snm_min", "must be positive"));
    }
    bisect_supply(tech, snm_min, "hold SNM", |v| hold_snm(cell, tech, v))
}

/// Data retention voltage: `max(v*, floor) + variation_margin + guard_band`.
pub fn drv(cell: &CellDesign, tech: &Technology, snm_min: f64) -> Result<f64> {
    Ok(guarded(tech, retention_voltage(cell, tech, snm_min)?))
}

/// DRV under the technology's retention criterion.
pub fn default_drv(cell: &CellDesign, tech: &Technology) -> Result<f64> {
    drv(cell, tech, tech.noise_margin.retention_snm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Operation {
    Read,
    Write,
}

/// Minimum supply for read (read SNM) or write (write margin), with the
/// same floor and margins as [`drv`].
pub fn min_operating_voltage(cell: &CellDesign, tech: &Technology, op: Operation, margin_min: f64) -> Result<f64> {
    if !(margin_min > 0.0) {
        return Err(invalid("margin_min", "must be positive"));
    }
    let v = match op {
        Operation::Read => bisect_supply(tech, margin_min, "read SNM", |v| read_snm(cell, tech, v))?,
        Operation::Write => bisect_supply(tech, margin_min, "write margin", |v| write_margin(cell, tech, v))?,
    };
    Ok(guarded(tech, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepMetric {
    HoldSnm,
    ReadSnm,
    WriteMargin,
}

/// Transistor pair whose W and L a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweptDevice {
    PullDown,
    PullUp,
    Access,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub w_values: Vec<f64>,
    pub l_values: Vec<f64>,
    pub target_metric: SweepMetric,
    pub device: SweptDevice,
    /// Cell whose other dimensions stay fixed.
    pub base: CellDesign,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        for (name, vals) in [("w_values", &self.w_values), ("l_values", &self.l_values)] {
            if vals.is_empty() {
                return Err(invalid(name, "grid is empty"));
            }
            if vals.iter().any(|v| !(*v >= 1.0) || !v.is_finite()) {
                return Err(invalid(name, "grid values must be at least 1.0"));
            }
            if vals.windows(2).any(|p| !(p[1] > p[0])) {
                return Err(invalid(name, "grid must be strictly increasing"));
            }
        }
        Ok(())
    }

    fn cell_at(&self, w: f64, l: f64) -> CellDesign {
        let mut c = self.base;
        match self.device {
            SweptDevice::PullDown => {
                c.sizing.w_m12 = w;
                c.sizing.l_m12 = l;
            }
            SweptDevice::PullUp => {
                c.sizing.w_m34 = w;
                c.sizing.l_m34 = l;
            }
            SweptDevice::Access => {
                c.sizing.w_m56 = w;
                c.sizing.l_m56 = l;
            }
        }
        c
    }
}

/// Grid-point key with a total order on the float pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub w: f64,
    pub l: f64,
}

impl Eq for GridPoint {}

impl PartialOrd for GridPoint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GridPoint {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.w.total_cmp(&other.w).then(self.l.total_cmp(&other.l))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// `None` where the metric could not be evaluated.
    pub surface: BTreeMap<GridPoint, Option<f64>>,
    pub argmax: Option<(GridPoint, f64)>,
    pub metric: SweepMetric,
    pub device: SweptDevice,
}

pub fn sweep_metric(cell: &CellDesign, tech: &Technology, vdd: f64, metric: SweepMetric) -> Result<f64> {
    match metric {
        SweepMetric::HoldSnm => hold_snm(cell, tech, vdd),
        SweepMetric::ReadSnm => read_snm(cell, tech, vdd),
        SweepMetric::WriteMargin => write_margin(cell, tech, vdd),
    }
}

/// Evaluate the metric over the W×L grid of the swept device.
///
/// Ties for the maximum go to the larger device area, then the larger L:
/// electrically equivalent but bigger devices match better.
pub fn sizing_sweep(grid: &SweepGrid, tech: &Technology, vdd: f64) -> Result<SweepResult> {
    grid.validate()?;
    let points: Vec<GridPoint> =
        grid.w_values.iter().flat_map(|&w| grid.l_values.iter().map(move |&l| GridPoint { w, l })).collect();
    let values: Vec<Option<f64>> =
        points.par_iter().map(|p| sweep_metric(&grid.cell_at(p.w, p.l), tech, vdd, grid.target_metric).ok()).collect();
    let surface: BTreeMap<GridPoint, Option<f64>> = points.into_iter().zip(values).collect();
    let mut argmax: Option<(GridPoint, f64)> = None;
    for (p, v) in &surface {
        let Some(v) = *v else { continue };
        let better = match argmax {
            None => true,
            Some((q, best)) => v > best || (v == best && (p.w * p.l, p.l) > (q.w * q.l, q.l)),
        };
        if better {
            argmax = Some((*p, v));
        }
    }
    Ok(SweepResult { surface, argmax, metric: grid.target_metric, device: grid.device })
}

/// CSV with columns `w,l,metric`; unevaluable points are left blank.
pub fn write_sweep_csv(result: &SweepResult, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "w,l,metric")?;
    for (p, v) in &result.surface {
        let v = v.map(fmt_num).unwrap_or_default();
        writeln!(out, "{},{},{}", fmt_num(p.w), fmt_num(p.l), v)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::{preset_cell, SizingMethod, TransistorSizing};
    use crate::presets;
    use crate::tech::VthClass;

    fn tech() -> Technology {
        presets::technology("ptm32").unwrap()
    }

    fn drv_cell(t: &Technology) -> CellDesign {
        preset_cell(SizingMethod::DrvBased, t, VthClass::High).unwrap()
    }

    #[test]
    fn zero_supply_zero_snm() {
        let t = tech();
        let r = butterfly(&drv_cell(&t), &t, 0.0, SnmMode::Hold).unwrap();
        assert_eq!(r.snm, 0.0);
    }

    #[test]
    fn symmetric_lobes() {
        let t = tech();
        for method in SizingMethod::ALL {
            let c = preset_cell(method, &t, VthClass::High).unwrap();
            for mode in [SnmMode::Hold, SnmMode::Read] {
                let r = butterfly(&c, &t, 0.5, mode).unwrap();
                assert!((r.lobe_a - r.lobe_b).abs() <= 1e-3, "{method} {mode:?}: {r:?}");
                assert!(r.snm > 0.0);
            }
        }
    }

    #[test]
    fn hold_at_least_read() {
        let t = tech();
        for method in SizingMethod::ALL {
            let c = preset_cell(method, &t, VthClass::High).unwrap();
            for vdd in [0.2, 0.35, 0.5] {
                let h = hold_snm(&c, &t, vdd).unwrap();
                let r = read_snm(&c, &t, vdd).unwrap();
                assert!(h + 1e-4 >= r, "{method} at {vdd}: hold {h} < read {r}");
            }
        }
    }

    #[test]
    fn swapping_curves_swaps_lobes() {
        let t = tech();
        let c = drv_cell(&t);
        let left = c.half_cell(&t);
        let right = left.shift_vth(0.02, -0.01);
        let ab = butterfly_halves(&t, &left, &right, 0.4, SnmMode::Hold).unwrap();
        let ba = butterfly_halves(&t, &right, &left, 0.4, SnmMode::Hold).unwrap();
        assert!((ab.snm - ba.snm).abs() < 2e-4, "{} vs {}", ab.snm, ba.snm);
        assert!((ab.lobe_a - ba.lobe_b).abs() < 2e-4);
        assert!((ab.lobe_b - ba.lobe_a).abs() < 2e-4);
    }

    #[test]
    fn drv_of_drv_preset() {
        let t = tech();
        let v = default_drv(&drv_cell(&t), &t).unwrap();
        assert!((v - 0.194).abs() < 1e-12, "{v}");
    }

    #[test]
    fn drv_floor_without_margins() {
        let mut t = tech();
        t.guard_band = 0.0;
        t.variation_margin = 0.0;
        let v = default_drv(&drv_cell(&t), &t).unwrap();
        assert!((v - 0.026).abs() < 1e-12, "{v}");
    }

    #[test]
    fn drv_rises_with_requirement() {
        let t = tech();
        let c = drv_cell(&t);
        let a = retention_voltage(&c, &t, 0.02).unwrap();
        let b = retention_voltage(&c, &t, 0.04).unwrap();
        let d = retention_voltage(&c, &t, 0.08).unwrap();
        assert!(a < b && b < d, "{a} {b} {d}");
    }

    #[test]
    fn unreachable_requirement_is_infeasible() {
        let t = tech();
        assert!(matches!(drv(&drv_cell(&t), &t, 0.6), Err(Error::InfeasibleDesign(_))));
    }

    #[test]
    fn read_and_write_sizings_help() {
        let t = tech();
        let conv = preset_cell(SizingMethod::Conventional, &t, VthClass::High).unwrap();
        let read = preset_cell(SizingMethod::ReadBased, &t, VthClass::High).unwrap();
        let write = preset_cell(SizingMethod::WriteBased, &t, VthClass::High).unwrap();
        let m = 0.04;
        let r_read = min_operating_voltage(&read, &t, Operation::Read, m).unwrap();
        let r_conv = min_operating_voltage(&conv, &t, Operation::Read, m).unwrap();
        assert!(r_read <= r_conv, "read {r_read} vs conventional {r_conv}");
        let w_write = min_operating_voltage(&write, &t, Operation::Write, m).unwrap();
        let w_conv = min_operating_voltage(&conv, &t, Operation::Write, m).unwrap();
        assert!(w_write <= w_conv, "write {w_write} vs conventional {w_conv}");
    }

    #[test]
    fn tiny_margin_reaches_guard_floor() {
        let t = tech();
        let c = preset_cell(SizingMethod::WriteBased, &t, VthClass::High).unwrap();
        let v = min_operating_voltage(&c, &t, Operation::Write, 1e-6).unwrap();
        assert!((v - t.retention_floor()).abs() < 2e-3, "{v}");
    }

    #[test]
    fn write_margin_grows_with_access_strength() {
        let t = tech();
        let c = preset_cell(SizingMethod::Conventional, &t, VthClass::High).unwrap();
        let mut strong = c;
        strong.sizing = TransistorSizing { w_m56: 4.0, ..c.sizing };
        let a = write_margin(&c, &t, 0.5).unwrap();
        let b = write_margin(&strong, &t, 0.5).unwrap();
        assert!(b > a, "{b} !> {a}");
    }

    #[test]
    fn single_point_sweep_matches_direct_call() {
        let t = tech();
        let base = drv_cell(&t);
        let grid = SweepGrid {
            w_values: vec![base.sizing.w_m12],
            l_values: vec![base.sizing.l_m12],
            target_metric: SweepMetric::HoldSnm,
            device: SweptDevice::PullDown,
            base,
        };
        let r = sizing_sweep(&grid, &t, 0.3).unwrap();
        assert_eq!(r.surface.len(), 1);
        assert_eq!(r.argmax.unwrap().1, hold_snm(&base, &t, 0.3).unwrap());
    }

    #[test]
    fn sweep_is_deterministic() {
        let t = tech();
        let base = drv_cell(&t);
        let grid = SweepGrid {
            w_values: vec![1.0, 3.0, 5.0],
            l_values: vec![1.0, 2.0],
            target_metric: SweepMetric::HoldSnm,
            device: SweptDevice::PullDown,
            base,
        };
        let a = sizing_sweep(&grid, &t, 0.3).unwrap();
        let b = sizing_sweep(&grid, &t, 0.3).unwrap();
        assert_eq!(a, b);
        let mut unsorted = grid.clone();
        unsorted.w_values = vec![3.0, 1.0, 5.0];
        assert!(sizing_sweep(&unsorted, &t, 0.3).is_err());
    }
}
