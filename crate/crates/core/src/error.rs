use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported technology `{0}`")]
    UnsupportedTechnology(String),

    #[error("supply {vdd:.4} V is at or below the retention level {retention:.4} V")]
    InoperableVoltage { vdd: f64, retention: f64 },

    #[error("VTC solve failed to bracket a root at input {vin:.6} V")]
    NumericalFailure { vin: f64 },

    #[error("design infeasible: {0}")]
    InfeasibleDesign(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("search space too large: {cardinality} candidates (limit {limit})")]
    SearchSpaceTooLarge { cardinality: u128, limit: u128 },

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
