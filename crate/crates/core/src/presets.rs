//! Built-in technology, sizing and workload data, plus config-file lookup.
//!
//! Lookup order for a named resource: an explicit file path, then
//! `<dir>/<name>.toml` under the directory named by [`CONFIG_DIR_ENV`],
//! then the copies compiled into the crate.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::Deserialize;

use crate::array::WorkloadProfile;
use crate::cell::{SizingMethod, TransistorSizing};
use crate::error::{Error, Result};
use crate::tech::Technology;

/// Environment variable naming a directory of override config files.
pub const CONFIG_DIR_ENV: &str = "SRAM_PAD_CONFIG_DIR";

const PTM32: &str = include_str!("../presets/ptm32.toml");
const PTM90: &str = include_str!("../presets/ptm90.toml");
const SIZING: &str = include_str!("../presets/sizing.csv");
const WORKLOADS: &str = include_str!("../presets/workloads.toml");

pub const TECHNOLOGY_NAMES: [&str; 2] = ["ptm32", "ptm90"];

pub fn technology_source(name: &str) -> Option<&'static str> {
    match name {
        "ptm32" => Some(PTM32),
        "ptm90" => Some(PTM90),
        _ => None,
    }
}

/// Built-in technology preset by name.
pub fn technology(name: &str) -> Result<Technology> {
    let src = technology_source(name).ok_or_else(|| Error::UnsupportedTechnology(name.to_string()))?;
    Technology::from_toml_str(src)
}

/// Resolve `spec` as a file path, then as `<config_dir>/<spec>.toml`, then
/// as a built-in name.
pub fn resolve_technology(spec: &str, config_dir: Option<&Path>) -> Result<Technology> {
    if let Some(path) = resolve_file(spec, config_dir) {
        return Technology::load(&path);
    }
    technology(spec)
}

fn resolve_file(spec: &str, config_dir: Option<&Path>) -> Option<PathBuf> {
    let direct = Path::new(spec);
    if spec.ends_with(".toml") || direct.components().count() > 1 {
        return Some(direct.to_path_buf());
    }
    let candidate = config_dir?.join(format!("{spec}.toml"));
    candidate.is_file().then_some(candidate)
}

/// Transistor sizings keyed by (method, node).
#[derive(Debug, Clone, PartialEq)]
pub struct SizingTable {
    entries: BTreeMap<(SizingMethod, String), TransistorSizing>,
}

impl SizingTable {
    /// Parse the transposed layout used by the shipped file: one row per
    /// transistor dimension, one column per `method/node`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader =
            csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if headers.len() < 2 {
            return Err(Error::Parse("sizing table needs at least one column".into()));
        }
        let mut columns = Vec::new();
        for h in headers.iter().skip(1) {
            let (m, node) =
                h.split_once('/').ok_or_else(|| Error::Parse(format!("column `{h}` is not method/node")))?;
            columns.push((m.parse::<SizingMethod>()?, node.to_string()));
        }
        let mut values: BTreeMap<&'static str, Vec<f64>> = BTreeMap::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            let key = match record.get(0).unwrap_or("") {
                "w_m12" => "w_m12",
                "w_m34" => "w_m34",
                "w_m56" => "w_m56",
                "l_m12" => "l_m12",
                "l_m34" => "l_m34",
                "l_m56" => "l_m56",
                other => return Err(Error::Parse(format!("unknown sizing row `{other}`"))),
            };
            let row: Vec<f64> = record
                .iter()
                .skip(1)
                .map(|v| v.parse::<f64>().map_err(|e| Error::Parse(format!("{key}: {e}"))))
                .collect::<Result<_>>()?;
            if row.len() != columns.len() {
                return Err(Error::Parse(format!("row `{key}` has {} values", row.len())));
            }
            if values.insert(key, row).is_some() {
                return Err(Error::Parse(format!("duplicate row `{key}`")));
            }
        }
        let get =
            |k: &str| -> Result<&Vec<f64>> { values.get(k).ok_or_else(|| Error::Parse(format!("missing row `{k}`"))) };
        let (w12, w34, w56) = (get("w_m12")?, get("w_m34")?, get("w_m56")?);
        let (l12, l34, l56) = (get("l_m12")?, get("l_m34")?, get("l_m56")?);
        let mut entries = BTreeMap::new();
        for (j, key) in columns.into_iter().enumerate() {
            let s = TransistorSizing {
                w_m12: w12[j],
                w_m34: w34[j],
                w_m56: w56[j],
                l_m12: l12[j],
                l_m34: l34[j],
                l_m56: l56[j],
            };
            s.validate()?;
            if entries.insert(key.clone(), s).is_some() {
                return Err(Error::Parse(format!("duplicate column {}/{}", key.0, key.1)));
            }
        }
        Ok(SizingTable { entries })
    }

    pub fn lookup(&self, method: SizingMethod, node: &str) -> Result<TransistorSizing> {
        self.entries
            .get(&(method, node.to_string()))
            .copied()
            .ok_or_else(|| Error::UnsupportedTechnology(format!("{node} ({method})")))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn sizing_table() -> &'static SizingTable {
    static TABLE: OnceLock<SizingTable> = OnceLock::new();
    TABLE.get_or_init(|| SizingTable::parse(SIZING).expect("built-in sizing table is valid"))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorkloadFile {
    profile: BTreeMap<String, WorkloadProfile>,
}

/// Named workload profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSet {
    pub profiles: BTreeMap<String, WorkloadProfile>,
}

impl WorkloadSet {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: WorkloadFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for p in file.profile.values() {
            p.validate()?;
        }
        Ok(WorkloadSet { profiles: file.profile })
    }

    pub fn get(&self, name: &str) -> Result<WorkloadProfile> {
        self.profiles.get(name).copied().ok_or_else(|| Error::Config(format!("unknown workload profile `{name}`")))
    }
}

pub fn workloads_source() -> &'static str {
    WORKLOADS
}

pub fn workloads() -> &'static WorkloadSet {
    static SET: OnceLock<WorkloadSet> = OnceLock::new();
    SET.get_or_init(|| WorkloadSet::from_toml_str(WORKLOADS).expect("built-in workloads are valid"))
}

/// Workload file from `<config_dir>/workloads.toml` if present, else built-in.
pub fn resolve_workloads(config_dir: Option<&Path>) -> Result<WorkloadSet> {
    if let Some(dir) = config_dir {
        let path = dir.join("workloads.toml");
        if path.is_file() {
            return WorkloadSet::from_toml_str(&std::fs::read_to_string(path)?);
        }
    }
    Ok(workloads().clone())
}
