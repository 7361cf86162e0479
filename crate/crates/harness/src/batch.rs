use rayon::prelude::*;
use serde::Serialize;
use wrfss::engine::run;
use wrfss::RunRecord;
use wrfss_cec2010::{load_from_env, BenchProblem};

use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::stats::SummaryStats;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunFailure {
    pub seed: u64,
    pub error: String,
}

#[derive(Clone, Debug)]
pub struct BatchResult {
    pub config: ExperimentConfig,
    pub bench: BenchProblem,
    /// Completed runs in seed order.
    pub records: Vec<RunRecord>,
    pub failures: Vec<RunFailure>,
    pub stats: SummaryStats,
}

/// Loads the configured problem and applies the `[problem]` overrides.
pub fn build_problem(config: &ExperimentConfig) -> Result<BenchProblem, HarnessError> {
    let mut bench = load_from_env(config.experiment.problem)?;
    apply_overrides(&mut bench, config)?;
    Ok(bench)
}

pub fn apply_overrides(bench: &mut BenchProblem, config: &ExperimentConfig) -> Result<(), HarnessError> {
    let to_config = |e: wrfss::ProblemError| HarnessError::Config(e.to_string());
    if bench.problem.delta() != config.problem.delta {
        bench.problem = bench.problem.with_delta(config.problem.delta).map_err(to_config)?;
    }
    if bench.problem.exponent() != config.problem.exponent {
        bench.problem = bench.problem.with_exponent(config.problem.exponent).map_err(to_config)?;
    }
    Ok(())
}

pub fn run_batch(config: &ExperimentConfig) -> Result<BatchResult, HarnessError> {
    let bench = build_problem(config)?;
    run_batch_on(config, bench)
}

/// Runs every seed of `config` in parallel against `bench`.
pub fn run_batch_on(config: &ExperimentConfig, bench: BenchProblem) -> Result<BatchResult, HarnessError> {
    config.validate()?;
    let variant = config.variant()?;
    let params = config.engine_params();
    let seeds: Vec<u64> = config.seeds().collect();
    let outcomes: Vec<_> = seeds
        .par_iter()
        .map(|&seed| (seed, run(&bench.problem, &variant, &params, seed)))
        .collect();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (seed, outcome) in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(e) => failures.push(RunFailure {
                seed,
                error: e.to_string(),
            }),
        }
    }
    let stats = SummaryStats::from_records(&records, failures.len());
    Ok(BatchResult {
        config: config.clone(),
        bench,
        records,
        failures,
        stats,
    })
}
