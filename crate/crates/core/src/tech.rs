//! Technology constants and the compact transistor model.
//!
//! The drain-current model is an alpha-power law above threshold, stitched at
//! overdrive `v_on = alpha * S / ln 10` to an exponential subthreshold branch
//! whose log-slope matches the alpha-power branch there. The drain-source
//! dependence is Sakurai–Newton style (parabolic below `vdsat`, flat with
//! channel-length modulation above), with threshold lowering by DIBL.
//!
//! Units: lengths in µm, voltages in V, currents in µA (drive) or nA
//! (leakage), capacitance in fF, time in ps.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Thermal voltage kT/q at 300 K.
pub const THERMAL_VOLTAGE: f64 = 0.025_85;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VthClass {
    High,
    Low,
}

impl VthClass {
    pub const ALL: [VthClass; 2] = [VthClass::High, VthClass::Low];

    pub fn letter(self) -> char {
        match self {
            VthClass::High => 'H',
            VthClass::Low => 'L',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'H' | 'h' => Some(VthClass::High),
            'L' | 'l' => Some(VthClass::Low),
            _ => None,
        }
    }
}

impl fmt::Display for VthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VthClass::High => f.write_str("high"),
            VthClass::Low => f.write_str("low"),
        }
    }
}

/// Threshold magnitudes for one V_th flavor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VthPair {
    pub n: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VthTable {
    pub high: VthPair,
    pub low: VthPair,
}

impl VthTable {
    pub fn get(&self, class: VthClass) -> VthPair {
        match class {
            VthClass::High => self.high,
            VthClass::Low => self.low,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParams {
    /// Velocity-saturation index, 1 (fully saturated) to 2 (square law).
    pub alpha_sat: f64,
    /// µA / V^alpha per unit W/L.
    pub k_drive: f64,
    /// Channel-length modulation, 1/V.
    pub lambda: f64,
    /// PMOS drive relative to NMOS at equal W/L.
    #[serde(default = "default_pmos_ratio")]
    pub pmos_ratio: f64,
    /// Saturation-voltage coefficient, `vdsat = knee + coeff * vov^(alpha/2)`.
    #[serde(default)]
    pub vdsat_coeff: f64,
    /// Drain saturation voltage of the subthreshold branch (V).
    #[serde(default = "default_sub_knee")]
    pub sub_knee: f64,
    /// mV/decade.
    pub subthreshold_slope: f64,
    #[serde(default)]
    pub dibl: f64,
}

fn default_pmos_ratio() -> f64 {
    0.5
}

fn default_sub_knee() -> f64 {
    2.0 * THERMAL_VOLTAGE
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        if !(1.0..=2.0).contains(&self.alpha_sat) {
            return Err(invalid("alpha_sat", format!("{} not in [1, 2]", self.alpha_sat)));
        }
        if !(self.k_drive > 0.0) {
            return Err(invalid("k_drive", "must be positive"));
        }
        if !(self.lambda >= 0.0) {
            return Err(invalid("lambda", "must be non-negative"));
        }
        if !(self.pmos_ratio > 0.0) {
            return Err(invalid("pmos_ratio", "must be positive"));
        }
        if !(self.vdsat_coeff >= 0.0) {
            return Err(invalid("vdsat_coeff", "must be non-negative"));
        }
        if !(self.sub_knee > 0.0) {
            return Err(invalid("sub_knee", "must be positive"));
        }
        if !(self.subthreshold_slope > 0.0) {
            return Err(invalid("subthreshold_slope", "must be positive"));
        }
        if !(self.dibl >= 0.0) {
            return Err(invalid("dibl", "must be non-negative"));
        }
        Ok(())
    }

    /// Overdrive at which the exponential and alpha-power branches meet.
    pub fn stitch_overdrive(&self) -> f64 {
        self.alpha_sat * self.subthreshold_slope * 1e-3 / std::f64::consts::LN_10
    }

    fn saturation_current(&self, w_over_l: f64, vov: f64) -> f64 {
        let v_on = self.stitch_overdrive();
        let a = self.alpha_sat;
        if vov >= v_on {
            self.k_drive * w_over_l * vov.powf(a)
        } else {
            self.k_drive * w_over_l * v_on.powf(a) * (a * (vov - v_on) / v_on).exp()
        }
    }

    /// Drain saturation voltage. Below the stitch point the excess over
    /// `sub_knee` decays no faster than the current itself, which keeps the
    /// drain current monotone in vgs.
    fn vdsat(&self, vov: f64) -> f64 {
        let v_on = self.stitch_overdrive();
        let a = self.alpha_sat;
        if vov >= v_on {
            self.sub_knee + self.vdsat_coeff * vov.powf(a / 2.0)
        } else {
            self.sub_knee + self.vdsat_coeff * v_on.powf(a / 2.0) * (a * (vov - v_on) / v_on).exp()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeakageParams {
    /// nA per unit W/L at zero threshold.
    pub i0: f64,
    /// mV/decade.
    pub subthreshold_slope: f64,
    #[serde(default)]
    pub dibl: f64,
}

impl LeakageParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.i0 > 0.0) {
            return Err(invalid("leakage.i0", "must be positive"));
        }
        if !(self.subthreshold_slope > 0.0) {
            return Err(invalid("leakage.subthreshold_slope", "must be positive"));
        }
        if !(self.dibl >= 0.0) {
            return Err(invalid("leakage.dibl", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BitlineParams {
    /// Bitline load seen by the read stack, fF.
    pub capacitance: f64,
    /// Differential the sense amplifier needs, V.
    pub sense_swing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Footprint {
    /// µm
    pub layout_w: f64,
    /// µm
    pub layout_h: f64,
}

/// Noise-margin operating points pinned per technology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseMarginSettings {
    /// Supply at which the hold-SNM sizing sweep is evaluated.
    pub sweep_supply: f64,
    /// Minimum SNM required of read and write designs.
    pub snm_min: f64,
    /// Hold-SNM level that counts as "state retained" for DRV.
    pub retention_snm: f64,
    /// Width grid of the hold sweep, multiples of l_min.
    pub sweep_w: Vec<f64>,
    /// Length grid of the hold sweep, multiples of l_min.
    pub sweep_l: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Technology {
    pub name: String,
    /// Node label matching the sizing-table columns, e.g. "32nm".
    pub node: String,
    /// µm
    pub l_min: f64,
    /// Wordline delay constant, ps/µm².
    pub k_wl: f64,
    pub vdd_nominal: f64,
    /// Supply used for read-delay characterization.
    pub vdd_active: f64,
    #[serde(default = "default_noise_floor")]
    pub thermal_noise_floor: f64,
    pub variation_margin: f64,
    #[serde(default = "default_guard_band")]
    pub guard_band: f64,
    /// Gate capacitance per area, fF/µm².
    pub gate_cap: f64,
    pub vth: VthTable,
    pub device: DeviceParams,
    pub leakage: LeakageParams,
    pub bitline: BitlineParams,
    pub cell: Footprint,
    pub noise_margin: NoiseMarginSettings,
}

fn default_noise_floor() -> f64 {
    0.026
}

fn default_guard_band() -> f64 {
    0.100
}

impl Technology {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let tech: Technology = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        tech.validate()?;
        Ok(tech)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(name, format!("{v} must be positive")))
            }
        };
        positive("l_min", self.l_min)?;
        positive("k_wl", self.k_wl)?;
        positive("vdd_nominal", self.vdd_nominal)?;
        positive("vdd_active", self.vdd_active)?;
        positive("gate_cap", self.gate_cap)?;
        positive("bitline.capacitance", self.bitline.capacitance)?;
        positive("bitline.sense_swing", self.bitline.sense_swing)?;
        positive("cell.layout_w", self.cell.layout_w)?;
        positive("cell.layout_h", self.cell.layout_h)?;
        for (name, v) in [
            ("thermal_noise_floor", self.thermal_noise_floor),
            ("guard_band", self.guard_band),
            ("variation_margin", self.variation_margin),
        ] {
            if !(v >= 0.0) {
                return Err(invalid(name, format!("{v} must be non-negative")));
            }
        }
        if !(self.vth.high.n > self.vth.low.n && self.vth.high.p > self.vth.low.p) {
            return Err(invalid("vth", "high thresholds must exceed low thresholds"));
        }
        let nm = &self.noise_margin;
        positive("noise_margin.sweep_supply", nm.sweep_supply)?;
        positive("noise_margin.snm_min", nm.snm_min)?;
        positive("noise_margin.retention_snm", nm.retention_snm)?;
        self.device.validate()?;
        self.leakage.validate()?;
        Ok(())
    }

    /// Lowest supply any cell can be operated at: floor plus both margins.
    pub fn retention_floor(&self) -> f64 {
        self.thermal_noise_floor + self.variation_margin + self.guard_band
    }
}

/// NMOS-style drain current magnitude in µA.
///
/// `vth` is the threshold magnitude; PMOS callers pass magnitudes of
/// `vsg`/`vsd` and scale by `DeviceParams::pmos_ratio`.
pub fn drain_current(dev: &DeviceParams, vth: f64, w_over_l: f64, vgs: f64, vds: f64) -> Result<f64> {
    if !(w_over_l > 0.0) {
        return Err(invalid("w_over_l", format!("{w_over_l} must be positive")));
    }
    if !vgs.is_finite() || !vds.is_finite() {
        return Err(invalid("bias", "non-finite terminal voltage"));
    }
    if vds < -1e-12 {
        return Err(invalid("vds", format!("{vds} is negative")));
    }
    Ok(drain_current_unchecked(dev, vth, w_over_l, vgs, vds.max(0.0)))
}

pub(crate) fn drain_current_unchecked(dev: &DeviceParams, vth: f64, w_over_l: f64, vgs: f64, vds: f64) -> f64 {
    let vov = vgs - (vth - dev.dibl * vds);
    let isat = dev.saturation_current(w_over_l, vov);
    if isat < 1e-300 {
        return 0.0;
    }
    let vdsat = dev.vdsat(vov);
    let r = vds / vdsat;
    let shape = if r < 1.0 { r * (2.0 - r) } else { 1.0 };
    isat * shape * (1.0 + dev.lambda * vds)
}

/// Off-state subthreshold leakage in nA of a device with drain at `vdd`.
pub fn leakage_current(tech: &Technology, vth_class: VthClass, w_over_l: f64, vdd: f64) -> Result<f64> {
    if !(vdd >= 0.0) {
        return Err(invalid("vdd", format!("{vdd} must be non-negative")));
    }
    if !(w_over_l > 0.0) {
        return Err(invalid("w_over_l", format!("{w_over_l} must be positive")));
    }
    let vth = tech.vth.get(vth_class).n;
    Ok(subthreshold_leakage(&tech.leakage, vth, w_over_l, vdd))
}

/// Leakage of an off device with threshold magnitude `vth` (either polarity).
pub(crate) fn subthreshold_leakage(leak: &LeakageParams, vth: f64, w_over_l: f64, vdd: f64) -> f64 {
    if vdd <= 0.0 {
        return 0.0;
    }
    let s = leak.subthreshold_slope * 1e-3;
    let exponent = (-vth + leak.dibl * vdd) / s;
    leak.i0 * w_over_l * 10f64.powf(exponent) * (1.0 - (-vdd / THERMAL_VOLTAGE).exp())
}
