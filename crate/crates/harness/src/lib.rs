//! Batch runner, reports and command-line interface for wrFSS experiments
//! on the CEC 2010 constrained problems.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod cli;
pub mod config;
pub mod error;
pub mod presets;
pub mod report;
pub mod stats;

pub use batch::{run_batch, run_batch_on, BatchResult, RunFailure};
pub use config::ExperimentConfig;
pub use error::HarnessError;
pub use presets::paper_preset;
pub use report::emit_reports;
pub use stats::{Moments, SummaryStats};
