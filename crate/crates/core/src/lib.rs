//! Power × area × delay exploration for SRAM rows built from multi-sized,
//! dual-threshold 6T cells.
//!
//! The crate is organised bottom-up:
//!
//! - [`tech`]: technology constants and the compact transistor model.
//! - [`cell`]: cell sizings, up-sizing, read delay, leakage.
//! - [`noise`]: butterfly curves, SNM, write margin, DRV, W/L sweeps.
//! - [`array`]: segment plans on a lumped wordline, row delay/area/power.
//! - [`optimize`]: PAD cost, greedy assignment, exhaustive oracle, variation.
//! - [`workload`]: sizing methods ranked under cache workload profiles.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod array;
pub mod cell;
pub mod error;
pub mod noise;
pub mod optimize;
pub mod presets;
pub mod report;
pub mod tech;
pub mod workload;

pub use error::{Error, Result};
