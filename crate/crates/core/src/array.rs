//! A row of cells on a lumped wordline: segment plans, per-cell delay,
//! D_diff, area and power.
//!
//! Cell `i` sees wordline delay `k_wl * pos(i)^2`, where `pos(i)` is the
//! summed effective width of cells `1..=i`, plus its own intrinsic delay.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cell::{cell_leakage_power, intrinsic_delay, upsize, CellDesign};
use crate::error::{invalid, Error, Result};
use crate::report::fmt_num;
use crate::tech::{Technology, VthClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SizeVersion {
    Nominal,
    UpsizedI,
    UpsizedII,
}

impl SizeVersion {
    /// Digit used in assignment labels: 1, 2 or 3.
    pub fn digit(self) -> u8 {
        match self {
            SizeVersion::Nominal => 1,
            SizeVersion::UpsizedI => 2,
            SizeVersion::UpsizedII => 3,
        }
    }

    fn from_digit(d: char) -> Option<Self> {
        match d {
            '1' => Some(SizeVersion::Nominal),
            '2' => Some(SizeVersion::UpsizedI),
            '3' => Some(SizeVersion::UpsizedII),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub count: usize,
    pub size: SizeVersion,
    /// Layout-width increment, µm.
    pub x: f64,
    pub vth: VthClass,
}

impl Segment {
    pub fn code(&self) -> String {
        format!("{}{}", self.size.digit(), self.vth.letter())
    }
}

/// Contiguous segments ordered from the driver outward.
///
/// In mirrored mode the segments describe one half of the row (driver to
/// middle) and the other half is its mirror image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentPlan {
    segments: Vec<Segment>,
    n_total: usize,
    mirrored: bool,
}

pub const MAX_SEGMENTS: usize = 3;

impl SegmentPlan {
    pub fn new(segments: Vec<Segment>, mirrored: bool) -> Result<Self> {
        if segments.is_empty() || segments.len() > MAX_SEGMENTS {
            return Err(invalid("segments", format!("{} segments, expected 1..=3", segments.len())));
        }
        let half: usize = segments.iter().map(|s| s.count).sum();
        if half == 0 {
            return Err(invalid("segments", "row has no cells"));
        }
        for (k, s) in segments.iter().enumerate() {
            if !s.x.is_finite() || s.x < 0.0 {
                return Err(invalid("x", format!("segment {} has x = {}", k + 1, s.x)));
            }
            if (s.size == SizeVersion::Nominal) != (s.x == 0.0) {
                return Err(invalid("x", format!("segment {}: nominal cells have x = 0 and only they do", k + 1)));
            }
            if k > 0 {
                let p = &segments[k - 1];
                if s.size < p.size {
                    return Err(invalid("segments", "size versions must not decrease away from the driver"));
                }
                if s.size == p.size && s.x != p.x {
                    return Err(invalid("x", "segments of one size version share x"));
                }
                if s.size > p.size && s.x < p.x {
                    return Err(invalid("x", "larger size versions need x at least as large"));
                }
                if s.size == p.size && s.vth == p.vth {
                    return Err(invalid("segments", "adjacent segments must differ"));
                }
            }
        }
        if segments.len() == 3 && segments[0].size == segments[2].size {
            return Err(invalid("segments", "a size version may span at most two segments"));
        }
        Ok(SegmentPlan { n_total: if mirrored { 2 * half } else { half }, segments, mirrored })
    }

    /// All cells nominal and high-V_th.
    pub fn baseline(n_cells: usize, mirrored: bool) -> Result<Self> {
        if mirrored && !n_cells.is_multiple_of(2) {
            return Err(invalid("n_cells", "mirrored rows need an even cell count"));
        }
        let count = if mirrored { n_cells / 2 } else { n_cells };
        SegmentPlan::new(vec![Segment { count, size: SizeVersion::Nominal, x: 0.0, vth: VthClass::High }], mirrored)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn mirrored(&self) -> bool {
        self.mirrored
    }

    /// Cells from the driver to the far end (or to the middle if mirrored).
    pub fn half_len(&self) -> usize {
        if self.mirrored {
            self.n_total / 2
        } else {
            self.n_total
        }
    }

    /// Assignment label such as `(1H,2H,3L)` or `(1H,0,0)`.
    pub fn label(&self) -> String {
        let mut parts: Vec<String> = self.segments.iter().map(Segment::code).collect();
        while parts.len() < MAX_SEGMENTS {
            parts.push("0".into());
        }
        format!("({})", parts.join(","))
    }

    /// Distance index from the nearest driver, 1-based.
    fn folded_index(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.n_total {
            return Err(Error::IndexOutOfRange { index: i, len: self.n_total });
        }
        Ok(if self.mirrored && i > self.n_total / 2 { self.n_total + 1 - i } else { i })
    }

    /// Segment index and offset within it for a folded index.
    fn locate(&self, j: usize) -> (usize, usize) {
        let mut start = 0;
        for (k, s) in self.segments.iter().enumerate() {
            if j <= start + s.count {
                return (k, j - start);
            }
            start += s.count;
        }
        unreachable!("folded index within row")
    }
}

impl fmt::Display for SegmentPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let counts: Vec<String> = self.segments.iter().map(|s| s.count.to_string()).collect();
        write!(f, "{};counts={}", self.label(), counts.join(","))?;
        for version in [SizeVersion::UpsizedI, SizeVersion::UpsizedII] {
            if let Some(s) = self.segments.iter().find(|s| s.size == version) {
                write!(f, ";x{}={}", version.digit() - 1, s.x)?;
            }
        }
        if self.mirrored {
            f.write_str(";mirrored")?;
        }
        Ok(())
    }
}

impl FromStr for SegmentPlan {
    type Err = Error;

    /// Parse `(1H,2H,3L);counts=68,70,118;x1=0.2;x2=0.4[;mirrored]`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("plan `{}`: {msg}", text.trim()));
        let mut fields = text.trim().split(';').map(str::trim);
        let label = fields.next().unwrap_or("");
        let inner = label
            .strip_prefix('(')
            .and_then(|l| l.strip_suffix(')'))
            .ok_or_else(|| bad("label must be parenthesized"))?;
        let mut codes = Vec::new();
        let mut ended = false;
        for tok in inner.split(',').map(str::trim) {
            if tok == "0" {
                ended = true;
                continue;
            }
            if ended {
                return Err(bad("empty entries must come last"));
            }
            let mut ch = tok.chars();
            let (Some(d), Some(v), None) = (ch.next(), ch.next(), ch.next()) else {
                return Err(bad("entries look like 1H, 2L or 0"));
            };
            let size = SizeVersion::from_digit(d).ok_or_else(|| bad("size digit must be 1, 2 or 3"))?;
            let vth = VthClass::from_letter(v).ok_or_else(|| bad("V_th letter must be H or L"))?;
            codes.push((size, vth));
        }
        let mut counts: Option<Vec<usize>> = None;
        let mut x1: Option<f64> = None;
        let mut x2: Option<f64> = None;
        let mut mirrored = false;
        for field in fields {
            if field == "mirrored" {
                mirrored = true;
                continue;
            }
            let (key, value) = field.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad("x must be a number"));
            match key.trim() {
                "counts" => {
                    let parsed = value
                        .split(',')
                        .map(|c| c.trim().parse::<usize>().map_err(|_| bad("counts must be integers")))
                        .collect::<Result<Vec<_>>>()?;
                    counts = Some(parsed);
                }
                "x1" => x1 = Some(num(value)?),
                "x2" => x2 = Some(num(value)?),
                _ => return Err(bad("unknown key")),
            }
        }
        let counts = counts.ok_or_else(|| bad("missing counts"))?;
        if counts.len() != codes.len() {
            return Err(bad("one count per segment"));
        }
        let segments = codes
            .iter()
            .zip(&counts)
            .map(|(&(size, vth), &count)| {
                let x = match size {
                    SizeVersion::Nominal => 0.0,
                    SizeVersion::UpsizedI => x1.ok_or_else(|| bad("missing x1"))?,
                    SizeVersion::UpsizedII => x2.ok_or_else(|| bad("missing x2"))?,
                };
                Ok(Segment { count, size, x, vth })
            })
            .collect::<Result<Vec<_>>>()?;
        SegmentPlan::new(segments, mirrored)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadProfile {
    /// Switched load per access, fF.
    pub c_load: f64,
    /// ps
    pub t_cycle: f64,
    pub alpha: f64,
    pub vdd: f64,
    pub idle_fraction: f64,
}

impl WorkloadProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_load >= 0.0) {
            return Err(invalid("c_load", "must be non-negative"));
        }
        if !(self.t_cycle > 0.0) {
            return Err(invalid("t_cycle", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(invalid("alpha", "must lie in [0, 1]"));
        }
        if !(self.vdd > 0.0) {
            return Err(invalid("vdd", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.idle_fraction) {
            return Err(invalid("idle_fraction", "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Switching power `½·C·V²/T·α·(1 − idle)` in µW.
    pub fn dynamic_power(&self) -> f64 {
        0.5 * self.c_load * self.vdd * self.vdd / self.t_cycle * self.alpha * 1000.0 * (1.0 - self.idle_fraction)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PadBreakdown {
    /// µW
    pub power: f64,
    pub dynamic_power: f64,
    pub leakage_power: f64,
    /// µm²
    pub area: f64,
    /// ps
    pub delay: f64,
    pub pad: f64,
    pub critical_cell_index: usize,
}

impl PadBreakdown {
    pub fn new(dynamic_power: f64, leakage_power: f64, area: f64, delay: f64, critical_cell_index: usize) -> Self {
        let power = dynamic_power + leakage_power;
        Self::with_power(power, dynamic_power, leakage_power, area, delay, critical_cell_index)
    }

    pub(crate) fn with_power(
        power: f64,
        dynamic_power: f64,
        leakage_power: f64,
        area: f64,
        delay: f64,
        critical_cell_index: usize,
    ) -> Self {
        PadBreakdown {
            power,
            dynamic_power,
            leakage_power,
            area,
            delay,
            pad: power * area * delay,
            critical_cell_index,
        }
    }
}

/// Characterized cell of one segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SegmentCell {
    pub count: usize,
    /// Effective layout width W + x, µm.
    pub width: f64,
    /// Intrinsic delay, ps.
    pub delay: f64,
    /// Leakage per cell, µW.
    pub leakage: f64,
}

pub(crate) fn segment_cell(
    base: &CellDesign,
    tech: &Technology,
    x: f64,
    vth: VthClass,
    vdd: f64,
    leak_vdd: f64,
) -> Result<SegmentCell> {
    let cell = upsize(&base.with_vth(vth), x)?;
    Ok(SegmentCell {
        count: 0,
        width: cell.effective_width(),
        delay: intrinsic_delay(&cell, tech, vdd)?,
        leakage: cell_leakage_power(&cell, tech, leak_vdd),
    })
}

fn plan_cells(
    plan: &SegmentPlan,
    base: &CellDesign,
    tech: &Technology,
    vdd: f64,
    leak_vdd: f64,
) -> Result<Vec<SegmentCell>> {
    plan.segments
        .iter()
        .map(|s| {
            let mut c = segment_cell(base, tech, s.x, s.vth, vdd, leak_vdd)?;
            c.count = s.count;
            Ok(c)
        })
        .collect()
}

/// Row metrics shared by the canonical and the fast evaluators, so both
/// produce identical bits for identical segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RowMetrics {
    pub leakage: f64,
    pub area: f64,
    pub delay: f64,
    pub critical: usize,
    /// Delay of the first segment's last cell and of the row's last cell.
    pub anchor_end_delay: Option<f64>,
    pub last_delay: f64,
}

pub(crate) fn row_metrics(cells: &[SegmentCell], k_wl: f64, layout_h: f64, mirrored: bool) -> RowMetrics {
    let mut pos = 0.0;
    let mut start = 0usize;
    let mut width_sum = 0.0;
    let mut leakage = 0.0;
    let mut worst = (0usize, f64::NEG_INFINITY);
    let mut anchor_end_delay = None;
    let mut last_delay = f64::NEG_INFINITY;
    for (k, c) in cells.iter().enumerate() {
        width_sum += c.count as f64 * c.width;
        leakage += c.count as f64 * c.leakage;
        if c.count == 0 {
            continue;
        }
        pos += c.count as f64 * c.width;
        start += c.count;
        let d = k_wl * pos * pos + c.delay;
        if k == 0 {
            anchor_end_delay = Some(d);
        }
        if d > worst.1 {
            worst = (start, d);
        }
        last_delay = d;
    }
    let factor = if mirrored { 2.0 } else { 1.0 };
    RowMetrics {
        leakage: factor * leakage,
        area: factor * (layout_h * width_sum),
        delay: worst.1,
        critical: worst.0,
        anchor_end_delay,
        last_delay,
    }
}

/// Summed effective width of cells `1..=i` (from the nearer driver when
/// mirrored), µm.
pub fn cell_position(plan: &SegmentPlan, base: &CellDesign, i: usize) -> Result<f64> {
    let j = plan.folded_index(i)?;
    let (seg, offset) = plan.locate(j);
    let mut pos = 0.0;
    for s in &plan.segments[..seg] {
        pos += s.count as f64 * (base.layout_w + s.x);
    }
    let s = &plan.segments[seg];
    Ok(pos + offset as f64 * (base.layout_w + s.x))
}

/// Wordline delay to cell `i` plus the cell's intrinsic delay, ps.
pub fn cell_read_delay(plan: &SegmentPlan, base: &CellDesign, tech: &Technology, i: usize, vdd: f64) -> Result<f64> {
    let pos = cell_position(plan, base, i)?;
    let (seg, _) = plan.locate(plan.folded_index(i)?);
    let s = &plan.segments[seg];
    let cell = upsize(&base.with_vth(s.vth), s.x)?;
    Ok(tech.k_wl * pos * pos + intrinsic_delay(&cell, tech, vdd)?)
}

/// Delay of the last cell minus delay of the last cell of the first segment.
pub fn d_diff(plan: &SegmentPlan, base: &CellDesign, tech: &Technology, vdd: f64) -> Result<f64> {
    if plan.segments.len() < 2 {
        return Err(Error::UndefinedMetric("D_diff needs at least two segments".into()));
    }
    let cells = plan_cells(plan, base, tech, vdd, vdd)?;
    let m = row_metrics(&cells, tech.k_wl, base.layout_h, plan.mirrored);
    let anchor = m.anchor_end_delay.ok_or_else(|| Error::UndefinedMetric("first segment is empty".into()))?;
    Ok(m.last_delay - anchor)
}

/// Index and delay of the slowest cell; ties go to the cell nearer the driver.
pub fn worst_case_delay(plan: &SegmentPlan, base: &CellDesign, tech: &Technology, vdd: f64) -> Result<(usize, f64)> {
    let cells = plan_cells(plan, base, tech, vdd, vdd)?;
    let m = row_metrics(&cells, tech.k_wl, base.layout_h, plan.mirrored);
    Ok((m.critical, m.delay))
}

/// `H · Σ count·(W + x)`, µm².
pub fn row_area(plan: &SegmentPlan, base: &CellDesign) -> f64 {
    let width: f64 = plan.segments.iter().map(|s| s.count as f64 * (base.layout_w + s.x)).sum();
    let factor = if plan.mirrored { 2.0 } else { 1.0 };
    factor * (base.layout_h * width)
}

/// Dynamic power of the workload plus leakage of every cell at the
/// workload supply, µW.
pub fn row_power(plan: &SegmentPlan, base: &CellDesign, workload: &WorkloadProfile, tech: &Technology) -> Result<f64> {
    workload.validate()?;
    let leak: f64 = plan
        .segments
        .iter()
        .map(|s| Ok(s.count as f64 * cell_leakage_power(&upsize(&base.with_vth(s.vth), s.x)?, tech, workload.vdd)))
        .sum::<Result<f64>>()?;
    let factor = if plan.mirrored { 2.0 } else { 1.0 };
    Ok(workload.dynamic_power() + factor * leak)
}

/// Power, area and worst-case delay of a plan and their product.
pub fn pad_breakdown(
    plan: &SegmentPlan,
    base: &CellDesign,
    workload: &WorkloadProfile,
    tech: &Technology,
    vdd: f64,
) -> Result<PadBreakdown> {
    workload.validate()?;
    let cells = plan_cells(plan, base, tech, vdd, workload.vdd)?;
    let m = row_metrics(&cells, tech.k_wl, base.layout_h, plan.mirrored);
    Ok(PadBreakdown::new(workload.dynamic_power(), m.leakage, m.area, m.delay, m.critical))
}

/// Wordline constant from per-length resistance (Ω/µm) and capacitance
/// (fF/µm) of a distributed line: `K = ½·r·c`, in ps/µm².
pub fn k_from_rc(r_per_um: f64, c_per_um: f64) -> f64 {
    0.5 * r_per_um * c_per_um * 1e-3
}

/// Per-cell `(i, position, delay)` over the whole row.
pub fn delay_profile(
    plan: &SegmentPlan,
    base: &CellDesign,
    tech: &Technology,
    vdd: f64,
) -> Result<Vec<(usize, f64, f64)>> {
    let cells = plan_cells(plan, base, tech, vdd, vdd)?;
    (1..=plan.n_total)
        .map(|i| {
            let pos = cell_position(plan, base, i)?;
            let (seg, _) = plan.locate(plan.folded_index(i)?);
            Ok((i, pos, tech.k_wl * pos * pos + cells[seg].delay))
        })
        .collect()
}

pub fn write_delay_profile_csv(profile: &[(usize, f64, f64)], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "i,position,delay")?;
    for (i, pos, d) in profile {
        writeln!(out, "{i},{},{}", fmt_num(*pos), fmt_num(*d))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::{preset_cell, SizingMethod};
    use crate::presets;

    fn setup() -> (Technology, CellDesign) {
        let t = presets::technology("ptm32").unwrap();
        let c = preset_cell(SizingMethod::DrvBased, &t, VthClass::High).unwrap();
        (t, c)
    }

    fn two_seg(n: usize, x: f64, vth: VthClass) -> SegmentPlan {
        SegmentPlan::new(
            vec![
                Segment { count: 256 - n, size: SizeVersion::Nominal, x: 0.0, vth: VthClass::High },
                Segment { count: n, size: SizeVersion::UpsizedI, x, vth },
            ],
            false,
        )
        .unwrap()
    }

    #[test]
    fn position_of_last_nominal_cell() {
        let (_, c) = setup();
        let p = SegmentPlan::baseline(256, false).unwrap();
        assert!((cell_position(&p, &c, 256).unwrap() - 204.8).abs() < 1e-9);
        assert!(matches!(cell_position(&p, &c, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(cell_position(&p, &c, 257).is_err());
        let q = two_seg(40, 0.2, VthClass::High);
        let expect = 256.0 * 0.8 + 40.0 * 0.2;
        assert!((cell_position(&q, &c, 256).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn delay_follows_lumped_formula() {
        let (t, c) = setup();
        let n = 100;
        let q = two_seg(n, 0.2, VthClass::High);
        let d1 = intrinsic_delay(&c, &t, 0.5).unwrap();
        let got = cell_read_delay(&q, &c, &t, 256 - n, 0.5).unwrap();
        let want = 0.0014 * ((256 - n) as f64 * 0.8).powi(2) + d1;
        assert!((got - want).abs() < 1e-9);
    }

    #[test]
    fn mirrored_ends_match() {
        let (t, c) = setup();
        let p: SegmentPlan = "(1H,2H,0);counts=100,28;x1=0.2;mirrored".parse().unwrap();
        assert_eq!(p.n_total(), 256);
        let a = cell_read_delay(&p, &c, &t, 1, 0.5).unwrap();
        let b = cell_read_delay(&p, &c, &t, 256, 0.5).unwrap();
        assert_eq!(a, b);
        let m = cell_read_delay(&p, &c, &t, 128, 0.5).unwrap();
        assert_eq!(m, cell_read_delay(&p, &c, &t, 129, 0.5).unwrap());
        assert!(SegmentPlan::baseline(255, true).is_err());
    }

    #[test]
    fn d_diff_closed_forms() {
        let (t, c) = setup();
        assert!(matches!(
            d_diff(&SegmentPlan::baseline(256, false).unwrap(), &c, &t, 0.5),
            Err(Error::UndefinedMetric(_))
        ));
        // x = 0 with a second flavor: D_diff = K(2nN - n²)W² + (d2 - d1)
        let n = 60usize;
        let p = SegmentPlan::new(
            vec![
                Segment { count: 256 - n, size: SizeVersion::Nominal, x: 0.0, vth: VthClass::High },
                Segment { count: n, size: SizeVersion::Nominal, x: 0.0, vth: VthClass::Low },
            ],
            false,
        )
        .unwrap();
        let d1 = intrinsic_delay(&c, &t, 0.5).unwrap();
        let d2 = intrinsic_delay(&c.with_vth(VthClass::Low), &t, 0.5).unwrap();
        let (nn, nf) = (256.0, n as f64);
        let want = (d2 - d1) + 0.0014 * (2.0 * nf * nn - nf * nf) * 0.64;
        let got = d_diff(&p, &c, &t, 0.5).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn eq3_expansion() {
        let (t, c) = setup();
        let (n, x) = (50usize, 0.3);
        let p = two_seg(n, x, VthClass::High);
        let d1 = intrinsic_delay(&c, &t, 0.5).unwrap();
        let d2 = intrinsic_delay(&upsize(&c, x).unwrap(), &t, 0.5).unwrap();
        let (nn, nf, w) = (256.0, n as f64, 0.8);
        let want = (d2 - d1) + 0.0014 * (nf * nf * x * x + 2.0 * nf * nn * w * x + (2.0 * nf * nn - nf * nf) * w * w);
        assert!((d_diff(&p, &c, &t, 0.5).unwrap() - want).abs() < 1e-8);
    }

    #[test]
    fn worst_case_all_nominal_is_last() {
        let (t, c) = setup();
        let p = SegmentPlan::baseline(256, false).unwrap();
        assert_eq!(worst_case_delay(&p, &c, &t, 0.5).unwrap().0, 256);
    }

    #[test]
    fn area_terms() {
        let (_, c) = setup();
        let p = SegmentPlan::baseline(256, false).unwrap();
        assert!((row_area(&p, &c) - 65.536).abs() < 1e-9);
        let q = two_seg(40, 0.2, VthClass::High);
        assert!((row_area(&q, &c) - (65.536 + 40.0 * 0.2 * 0.32)).abs() < 1e-9);
    }

    #[test]
    fn power_terms() {
        let (t, c) = setup();
        let w = WorkloadProfile { c_load: 100.0, t_cycle: 1000.0, alpha: 0.0, vdd: 0.5, idle_fraction: 0.0 };
        let p = SegmentPlan::baseline(256, false).unwrap();
        let leak = 256.0 * cell_leakage_power(&c, &t, 0.5);
        assert!((row_power(&p, &c, &w, &t).unwrap() - leak).abs() < 1e-9 * leak);

        let n = 30;
        let q = SegmentPlan::new(
            vec![
                Segment { count: 256 - n, size: SizeVersion::Nominal, x: 0.0, vth: VthClass::High },
                Segment { count: n, size: SizeVersion::Nominal, x: 0.0, vth: VthClass::Low },
            ],
            false,
        )
        .unwrap();
        let delta =
            n as f64 * (cell_leakage_power(&c.with_vth(VthClass::Low), &t, 0.5) - cell_leakage_power(&c, &t, 0.5));
        let diff = row_power(&q, &c, &w, &t).unwrap() - row_power(&p, &c, &w, &t).unwrap();
        assert!((diff - delta).abs() < 1e-9 * delta.abs().max(1e-12));

        let w1 = WorkloadProfile { alpha: 0.5, ..w };
        let w2 = WorkloadProfile { t_cycle: 2000.0, ..w1 };
        assert!((w1.dynamic_power() - 2.0 * w2.dynamic_power()).abs() < 1e-12);
    }

    #[test]
    fn pad_is_product_of_parts() {
        let (t, c) = setup();
        let w = presets::workloads().get("active").unwrap();
        let q = two_seg(40, 0.2, VthClass::Low);
        let b = pad_breakdown(&q, &c, &w, &t, 0.5).unwrap();
        assert_eq!(b.pad, b.power * b.area * b.delay);
        assert!(b.pad > 0.0);
    }

    #[test]
    fn plan_text_round_trip() {
        for text in [
            "(1H,0,0);counts=256",
            "(1H,2H,3L);counts=68,70,118;x1=0.16;x2=0.4",
            "(1H,1L,0);counts=124,132",
            "(1H,2L,0);counts=119,137;x1=0.2;mirrored",
        ] {
            let p: SegmentPlan = text.parse().unwrap();
            assert_eq!(p.to_string(), text);
        }
        for bad in [
            "",
            "1H,2H",
            "(1H,0,2H);counts=1,2;x1=0.1",
            "(1H,2H);counts=1;x1=0.1",
            "(1H,2H);counts=1,2",
            "(2H,1H);counts=1,2;x1=0.1",
            "(1H,1H);counts=1,2",
            "(1H,2H,3H);counts=1,2,3;x1=0.4;x2=0.2",
            "(1H);counts=0",
            "(1H);counts=4;bogus=1",
        ] {
            assert!(bad.parse::<SegmentPlan>().is_err(), "{bad}");
        }
    }

    #[test]
    fn k_from_rc_units() {
        assert!((k_from_rc(2.0, 1.4) - 0.0014).abs() < 1e-15);
    }
}
