//! Fish School Search for bound- and general-constrained minimization.
//!
//! The crate provides the classic school operators, the niching variant
//! with leader links, and a two-phase constrained engine with epsilon,
//! gradient-probe and penalty variants.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constraint;
pub mod engine;
pub mod error;
pub mod fss;
pub mod gradient;
pub mod problem;
pub mod rng;
pub mod wfss;

pub use constraint::{Acceptance, Comparator, EpsilonSchedule, Objective, Phase};
pub use engine::{run, run_observed, EngineError, EngineParams, EpsilonSettings, EpsilonStart, RunRecord, TraceRow, Variant, VariantKind};
pub use error::ParamError;
pub use gradient::ProbeConfig;
pub use problem::{Evaluation, Evaluator, FnSource, Interval, Problem, ProblemError};
