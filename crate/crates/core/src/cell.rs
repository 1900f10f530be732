//! 6T cell variants: sizing presets, up-sizing, and electrical characterization.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::presets;
use crate::tech::{drain_current_unchecked, subthreshold_leakage, Technology, VthClass};

/// Transistor dimensions as multiples of `l_min`.
///
/// M1/M2 are the pull-down NMOS, M3/M4 the pull-up PMOS, M5/M6 the access NMOS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransistorSizing {
    pub w_m12: f64,
    pub w_m34: f64,
    pub w_m56: f64,
    pub l_m12: f64,
    pub l_m34: f64,
    pub l_m56: f64,
}

impl TransistorSizing {
    /// 3:2:2 ratioed baseline with minimum lengths.
    pub const CONVENTIONAL: TransistorSizing =
        TransistorSizing { w_m12: 3.0, w_m34: 2.0, w_m56: 2.0, l_m12: 1.0, l_m34: 1.0, l_m56: 1.0 };

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("w_m12", self.w_m12),
            ("w_m34", self.w_m34),
            ("w_m56", self.w_m56),
            ("l_m12", self.l_m12),
            ("l_m34", self.l_m34),
            ("l_m56", self.l_m56),
        ] {
            if !(v >= 1.0) || !v.is_finite() {
                return Err(invalid(name, format!("{v} is below 1.0 x l_min")));
            }
        }
        Ok(())
    }

    fn scale_widths(&self, factor: f64) -> TransistorSizing {
        TransistorSizing { w_m12: self.w_m12 * factor, w_m34: self.w_m34 * factor, w_m56: self.w_m56 * factor, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SizingMethod {
    Conventional,
    DrvBased,
    ReadBased,
    WriteBased,
}

impl SizingMethod {
    pub const ALL: [SizingMethod; 4] =
        [SizingMethod::Conventional, SizingMethod::DrvBased, SizingMethod::ReadBased, SizingMethod::WriteBased];

    pub fn as_str(self) -> &'static str {
        match self {
            SizingMethod::Conventional => "conventional",
            SizingMethod::DrvBased => "drv-based",
            SizingMethod::ReadBased => "read-based",
            SizingMethod::WriteBased => "write-based",
        }
    }
}

impl fmt::Display for SizingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SizingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        match norm.as_str() {
            "conventional" | "conv" => Ok(SizingMethod::Conventional),
            "drvbased" | "drv" | "hold" => Ok(SizingMethod::DrvBased),
            "readbased" | "read" => Ok(SizingMethod::ReadBased),
            "writebased" | "write" => Ok(SizingMethod::WriteBased),
            _ => Err(Error::Parse(format!("unknown sizing method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellDesign {
    pub sizing: TransistorSizing,
    pub vth_class: VthClass,
    /// Nominal layout width W, µm.
    pub layout_w: f64,
    /// Layout height H, µm; shared by every size version.
    pub layout_h: f64,
    /// Layout-width increment x, µm.
    pub upsize_x: f64,
    pub method: SizingMethod,
}

impl CellDesign {
    pub fn effective_width(&self) -> f64 {
        self.layout_w + self.upsize_x
    }

    pub fn footprint_area(&self) -> f64 {
        self.effective_width() * self.layout_h
    }

    pub fn with_vth(&self, vth_class: VthClass) -> CellDesign {
        CellDesign { vth_class, ..*self }
    }

    /// Electrical view of one half-cell (both halves are identical).
    pub fn half_cell(&self, tech: &Technology) -> HalfCell {
        let vth = tech.vth.get(self.vth_class);
        let s = &self.sizing;
        HalfCell {
            pull_down: Fet { w_over_l: s.w_m12 / s.l_m12, vth: vth.n },
            pull_up: Fet { w_over_l: s.w_m34 / s.l_m34, vth: vth.p },
            access: Fet { w_over_l: s.w_m56 / s.l_m56, vth: vth.n },
        }
    }
}

/// Preset sizing (or the conventional baseline) for `method` on `tech`.
pub fn preset_cell(method: SizingMethod, tech: &Technology, vth: VthClass) -> Result<CellDesign> {
    let sizing = match method {
        SizingMethod::Conventional => {
            // only nodes present in the sizing table are supported
            presets::sizing_table().lookup(SizingMethod::DrvBased, &tech.node)?;
            TransistorSizing::CONVENTIONAL
        }
        m => presets::sizing_table().lookup(m, &tech.node)?,
    };
    Ok(CellDesign {
        sizing,
        vth_class: vth,
        layout_w: tech.cell.layout_w,
        layout_h: tech.cell.layout_h,
        upsize_x: 0.0,
        method,
    })
}

/// Widen the layout by `x` µm, scaling every transistor width uniformly.
pub fn upsize(cell: &CellDesign, x: f64) -> Result<CellDesign> {
    if !(x >= 0.0) {
        return Err(invalid("x", format!("{x} must be non-negative")));
    }
    if x > cell.layout_w * (1.0 + 1e-12) {
        return Err(invalid("x", format!("{x} exceeds layout width {}", cell.layout_w)));
    }
    if x == 0.0 {
        return Ok(*cell);
    }
    let old = cell.effective_width();
    let new = old + x;
    Ok(CellDesign { sizing: cell.sizing.scale_widths(new / old), upsize_x: cell.upsize_x + x, ..*cell })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fet {
    pub w_over_l: f64,
    /// Threshold magnitude, V.
    pub vth: f64,
}

/// Pull-down, pull-up and access device of one side of the cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfCell {
    pub pull_down: Fet,
    pub pull_up: Fet,
    pub access: Fet,
}

impl HalfCell {
    pub fn scale_widths(&self, factor: f64) -> HalfCell {
        let s = |f: Fet| Fet { w_over_l: f.w_over_l * factor, ..f };
        HalfCell { pull_down: s(self.pull_down), pull_up: s(self.pull_up), access: s(self.access) }
    }

    pub fn shift_vth(&self, delta_n: f64, delta_p: f64) -> HalfCell {
        HalfCell {
            pull_down: Fet { vth: self.pull_down.vth + delta_n, ..self.pull_down },
            pull_up: Fet { vth: self.pull_up.vth + delta_p, ..self.pull_up },
            access: Fet { vth: self.access.vth + delta_n, ..self.access },
        }
    }

    pub(crate) fn i_pull_down(&self, tech: &Technology, vgs: f64, vds: f64) -> f64 {
        let f = self.pull_down;
        drain_current_unchecked(&tech.device, f.vth, f.w_over_l, vgs, vds)
    }

    pub(crate) fn i_pull_up(&self, tech: &Technology, vsg: f64, vsd: f64) -> f64 {
        let f = self.pull_up;
        tech.device.pmos_ratio * drain_current_unchecked(&tech.device, f.vth, f.w_over_l, vsg, vsd)
    }

    pub(crate) fn i_access(&self, tech: &Technology, vgs: f64, vds: f64) -> f64 {
        let f = self.access;
        drain_current_unchecked(&tech.device, f.vth, f.w_over_l, vgs, vds)
    }

    /// Bitline discharge current through access + pull-down with the
    /// wordline and bitline at `vdd` and the stored node low.
    pub fn read_current(&self, tech: &Technology, vdd: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, vdd);
        for _ in 0..80 {
            let vq = 0.5 * (lo + hi);
            let i_acc = self.i_access(tech, vdd - vq, vdd - vq);
            let i_pd = self.i_pull_down(tech, vdd, vq);
            if i_acc > i_pd {
                lo = vq;
            } else {
                hi = vq;
            }
        }
        let vq = 0.5 * (lo + hi);
        self.i_pull_down(tech, vdd, vq)
    }

    /// Read delay (ps) for a given bitline current budget.
    pub fn read_delay(&self, tech: &Technology, vdd: f64) -> f64 {
        let i = self.read_current(tech, vdd);
        1000.0 * tech.bitline.capacitance * tech.bitline.sense_swing / i
    }

    /// Hold-state leakage power in µW: one pull-down, one pull-up and the
    /// access device on the low node (bitlines precharged).
    pub fn leakage_power(&self, tech: &Technology, vdd: f64) -> f64 {
        if vdd <= 0.0 {
            return 0.0;
        }
        let l = &tech.leakage;
        let na = subthreshold_leakage(l, self.pull_down.vth, self.pull_down.w_over_l, vdd)
            + subthreshold_leakage(l, self.pull_up.vth, self.pull_up.w_over_l, vdd)
            + subthreshold_leakage(l, self.access.vth, self.access.w_over_l, vdd);
        na * vdd * 1e-3
    }
}

/// Intrinsic read delay (ps): bitline discharge through the access and
/// pull-down stack.
pub fn intrinsic_delay(cell: &CellDesign, tech: &Technology, vdd: f64) -> Result<f64> {
    let retention = tech.retention_floor();
    if !(vdd > retention) {
        return Err(Error::InoperableVoltage { vdd, retention });
    }
    Ok(cell.half_cell(tech).read_delay(tech, vdd))
}

/// Hold-state leakage power (µW) of the whole cell.
pub fn cell_leakage_power(cell: &CellDesign, tech: &Technology, vdd: f64) -> f64 {
    cell.half_cell(tech).leakage_power(tech, vdd)
}

/// Gate capacitance (fF) the cell's two access devices put on the wordline.
pub fn wordline_load(cell: &CellDesign, tech: &Technology) -> f64 {
    let s = &cell.sizing;
    2.0 * tech.gate_cap * (s.w_m56 * tech.l_min) * (s.l_m56 * tech.l_min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Characterization {
    pub cell: CellDesign,
    pub vdd: f64,
    pub delay_ps: f64,
    pub leakage_uw: f64,
    pub wordline_load_ff: f64,
}

/// Characterize every preset method in both V_th flavors at `vdd`.
pub fn characterize_presets(tech: &Technology, vdd: f64) -> Result<Vec<Characterization>> {
    let mut out = Vec::new();
    for method in SizingMethod::ALL {
        for vth in VthClass::ALL {
            let cell = preset_cell(method, tech, vth)?;
            out.push(Characterization {
                delay_ps: intrinsic_delay(&cell, tech, vdd)?,
                leakage_uw: cell_leakage_power(&cell, tech, vdd),
                wordline_load_ff: wordline_load(&cell, tech),
                cell,
                vdd,
            });
        }
    }
    Ok(out)
}
