//! Report files written after a batch.
//!
//! * `summary.txt`: human-readable statistics next to the published values.
//! * `summary.json`: the same content, machine-readable.
//! * `traces/run_NNN.csv`: per-run convergence trace.
//! * `manifest.json`: full configuration, seeds, evaluation counts and timing.
//!
//! The summaries hold no timing information, so identical configurations
//! produce byte-identical summary files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wrfss::{RunRecord, TraceRow};
use wrfss_cec2010::{known_reference_values, BenchId, DataSource, Reference};

use crate::batch::{BatchResult, RunFailure};
use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::stats::{Moments, SummaryStats};

pub const SUMMARY_TXT: &str = "summary.txt";
pub const SUMMARY_JSON: &str = "summary.json";
pub const MANIFEST_JSON: &str = "manifest.json";
pub const TRACE_DIR: &str = "traces";
pub const TRACE_HEADER: &str = "iteration,best_fitness,best_violation,phase,feasible_count";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Creates the output tree and checks that it is writable.
pub fn prepare_output(dir: &Path) -> Result<(), HarnessError> {
    let traces = dir.join(TRACE_DIR);
    fs::create_dir_all(&traces).map_err(io_err(&traces))?;
    let probe = dir.join(".write-check");
    fs::write(&probe, b"").map_err(io_err(&probe))?;
    fs::remove_file(&probe).map_err(io_err(&probe))?;
    Ok(())
}

pub fn trace_file_name(index: usize) -> String {
    format!("run_{index:03}.csv")
}

pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut out = String::with_capacity(trace.len() * 48);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in trace {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.iteration, r.best_fitness, r.best_violation, r.phase, r.feasible_count
        );
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub best_fitness: f64,
    pub best_violation: f64,
    pub feasible: bool,
    pub evaluations: u64,
    pub probes: u64,
}

impl From<&RunRecord> for RunSummary {
    fn from(r: &RunRecord) -> Self {
        Self {
            seed: r.seed,
            best_fitness: r.best.fitness,
            best_violation: r.best.violation,
            feasible: r.best.feasible,
            evaluations: r.evaluations,
            probes: r.probes,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary<'a> {
    pub problem: BenchId,
    pub variant: &'static str,
    pub data_source: &'a DataSource,
    pub iterations: u64,
    pub stats: &'a SummaryStats,
    pub reference: Reference,
    pub runs: Vec<RunSummary>,
    pub failures: &'a [RunFailure],
}

#[derive(Clone, Debug, Serialize)]
pub struct ManifestRun {
    pub seed: u64,
    pub trace_file: String,
    pub iterations: u64,
    pub evaluations: u64,
    pub probes: u64,
    pub phase_transitions: u64,
    pub epsilon0: Option<f64>,
    pub wall_time_secs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool_version: &'static str,
    pub config: &'a ExperimentConfig,
    pub data_source: &'a DataSource,
    pub seeds: Vec<u64>,
    pub runs: Vec<ManifestRun>,
    pub failures: &'a [RunFailure],
    pub total_evaluations: u64,
    pub total_wall_time_secs: f64,
}

/// Reads the configuration back out of a batch manifest.
pub fn config_from_manifest(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    #[derive(Deserialize)]
    struct Partial {
        config: ExperimentConfig,
    }
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let partial: Partial =
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    partial.config.validate()?;
    Ok(partial.config)
}

/// Scientific notation with a two-digit exponent, e.g. `-7.47E-01`.
pub fn sci(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.digits$e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

pub fn summary_text(result: &BatchResult, reference: &Reference) -> String {
    let s = &result.stats;
    let c = &result.config;
    let mut out = String::new();
    let _ = writeln!(out, "problem     {}", c.experiment.problem);
    let _ = writeln!(out, "variant     {}", c.experiment.variant.label());
    let _ = writeln!(out, "data        {}", result.bench.source);
    let _ = writeln!(out, "iterations  {}", c.engine.iterations);
    let _ = writeln!(out, "school      {}", c.engine.school_size);
    let _ = writeln!(out, "seeds       {}..={}", c.experiment.base_seed, c.experiment.base_seed + c.experiment.runs as u64 - 1);
    let _ = writeln!(out, "runs        {} completed, {} failed", s.completed, s.failed);
    let _ = writeln!(out, "feasible    {} / {}", s.feasible_runs, s.completed);
    out.push('\n');
    let _ = writeln!(out, "{:<8}{:>16}{:>16}", "", "fitness", "violation");
    type Pick = fn(&Moments) -> f64;
    let rows: [(&str, Pick); 4] = [("Mean", |m| m.mean), ("SD", |m| m.sd), ("min", |m| m.min), ("max", |m| m.max)];
    for (label, pick) in rows {
        let cell = |m: &Option<Moments>| m.as_ref().map_or_else(|| "-".to_string(), |m| sci(pick(m), 6));
        let _ = writeln!(out, "{label:<8}{:>16}{:>16}", cell(&s.fitness), cell(&s.violation));
    }
    out.push('\n');
    let _ = writeln!(out, "published fitness on {} (30 runs, 80000 iterations)", reference.id);
    let _ = writeln!(out, "{:<12}{:>12}{:>12}", "algorithm", "mean", "SD");
    if let Some(m) = &s.fitness {
        let _ = writeln!(out, "{:<12}{:>12}{:>12}", "this batch", sci(m.mean, 2), sci(m.sd, 2));
    }
    for row in &reference.rows {
        let _ = writeln!(out, "{:<12}{:>12}{:>12}", row.algorithm, sci(row.mean, 2), sci(row.sd, 2));
    }
    if !result.failures.is_empty() {
        out.push('\n');
        let _ = writeln!(out, "failed runs");
        for f in &result.failures {
            let _ = writeln!(out, "  seed {}: {}", f.seed, f.error);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportPaths {
    pub summary_txt: PathBuf,
    pub summary_json: PathBuf,
    pub manifest: PathBuf,
    pub traces: Vec<PathBuf>,
}

pub fn emit_reports(dir: &Path, result: &BatchResult) -> Result<ReportPaths, HarnessError> {
    prepare_output(dir)?;
    let reference = known_reference_values(result.config.experiment.problem);

    let mut traces = Vec::with_capacity(result.records.len());
    let index_of = |seed: u64| seed.wrapping_sub(result.config.experiment.base_seed) as usize;
    for r in &result.records {
        let path = dir.join(TRACE_DIR).join(trace_file_name(index_of(r.seed)));
        fs::write(&path, trace_csv(&r.trace)).map_err(io_err(&path))?;
        traces.push(path);
    }

    let summary = Summary {
        problem: result.config.experiment.problem,
        variant: result.config.experiment.variant.name(),
        data_source: &result.bench.source,
        iterations: result.config.engine.iterations,
        stats: &result.stats,
        reference: reference.clone(),
        runs: result.records.iter().map(RunSummary::from).collect(),
        failures: &result.failures,
    };
    let summary_txt = dir.join(SUMMARY_TXT);
    fs::write(&summary_txt, summary_text(result, &reference)).map_err(io_err(&summary_txt))?;
    let summary_json = dir.join(SUMMARY_JSON);
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&summary_json, json + "\n").map_err(io_err(&summary_json))?;

    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        config: &result.config,
        data_source: &result.bench.source,
        seeds: result.config.seeds().collect(),
        runs: result
            .records
            .iter()
            .map(|r| ManifestRun {
                seed: r.seed,
                trace_file: format!("{TRACE_DIR}/{}", trace_file_name(index_of(r.seed))),
                iterations: r.iterations,
                evaluations: r.evaluations,
                probes: r.probes,
                phase_transitions: r.phase_transitions,
                epsilon0: r.epsilon0,
                wall_time_secs: r.wall_time_secs,
            })
            .collect(),
        failures: &result.failures,
        total_evaluations: result.records.iter().map(|r| r.evaluations).sum(),
        total_wall_time_secs: result.records.iter().map(|r| r.wall_time_secs).sum(),
    };
    let manifest_path = dir.join(MANIFEST_JSON);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&manifest_path, json + "\n").map_err(io_err(&manifest_path))?;

    Ok(ReportPaths {
        summary_txt,
        summary_json,
        manifest: manifest_path,
        traces,
    })
}
