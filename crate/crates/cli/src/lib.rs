//! Std companion of `iacount-core`: result records, output formats, and a
//! deterministic parallel driver for the Monte Carlo estimators.

pub mod record;
pub mod runner;

pub use record::{Format, ResultRecord};
pub use runner::{estimate_parallel, EstimatorKind};
