use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wrfss::engine::VariantKind;
use wrfss_cec2010::{feasible_ratio, load_from_env, BenchId};

use crate::batch::run_batch;
use crate::config::ExperimentConfig;
use crate::error::HarnessError;
use crate::presets::{all_presets, paper_preset};
use crate::report::{config_from_manifest, emit_reports, prepare_output, sci};

#[derive(Debug, Parser)]
#[command(name = "wrfss", version, about = "Fish School Search experiments on CEC 2010 constrained problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment from a config file, a manifest, or flags.
    Run(RunArgs),
    /// Run a grid of paper-protocol experiments.
    Batch(BatchArgs),
    /// Estimate feasible-region ratios by Monte Carlo sampling.
    Table1(Table1Args),
    /// List the paper-protocol configurations.
    Presets(PresetArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Engine defaults.
    Default,
    /// Published per-problem, per-variant parameters.
    Paper,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["config", "manifest", "problem"])))]
pub struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Re-run the configuration recorded in a batch manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, value_parser = parse_bench)]
    pub problem: Option<BenchId>,
    #[arg(long, value_parser = parse_variant, default_value = "wrfss")]
    pub variant: VariantKind,
    #[arg(long, value_enum, default_value = "default")]
    pub preset: Preset,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// Use the 5000-iteration desk budget.
    #[arg(long)]
    pub desk: bool,
    #[arg(long)]
    pub runs: Option<usize>,
    /// Base seed; run `i` uses `seed + i`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub iterations: Option<u64>,
    #[arg(long)]
    pub school_size: Option<usize>,
}

impl Overrides {
    fn apply(&self, c: &mut ExperimentConfig) {
        if self.desk {
            c.engine.iterations = crate::presets::DESK_ITERATIONS;
        }
        if let Some(v) = self.runs {
            c.experiment.runs = v;
        }
        if let Some(v) = self.seed {
            c.experiment.base_seed = v;
        }
        if let Some(v) = self.iterations {
            c.engine.iterations = v;
        }
        if let Some(v) = self.school_size {
            c.engine.school_size = v;
        }
    }
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// Comma-separated problem ids; all seven by default.
    #[arg(long, value_delimiter = ',', value_parser = parse_bench)]
    pub problems: Vec<BenchId>,
    /// Comma-separated variants; all four by default.
    #[arg(long, value_delimiter = ',', value_parser = parse_variant)]
    pub variants: Vec<VariantKind>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', value_parser = parse_bench)]
    pub problems: Vec<BenchId>,
}

#[derive(Debug, Args)]
pub struct PresetArgs {
    #[arg(long)]
    pub desk: bool,
    /// Print each configuration as TOML.
    #[arg(long)]
    pub toml: bool,
}

fn parse_bench(s: &str) -> Result<BenchId, String> {
    s.parse().map_err(|e: wrfss_cec2010::BenchError| e.to_string())
}

fn parse_variant(s: &str) -> Result<VariantKind, String> {
    s.parse().map_err(|e: wrfss::ParamError| e.to_string())
}

/// Parses `args` and executes the command. Returns the process exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    cli_main_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

/// [`cli_main`] with explicit output streams.
pub fn cli_main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(text) => {
            let _ = write!(out, "{text}");
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

pub fn execute(command: Command) -> Result<String, HarnessError> {
    match command {
        Command::Run(args) => run_command(args),
        Command::Batch(args) => batch_command(args),
        Command::Table1(args) => Ok(table1(args)?),
        Command::Presets(args) => Ok(presets(args)),
    }
}

fn run_config(args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut c = if let Some(path) = &args.config {
        ExperimentConfig::load(path)?
    } else if let Some(path) = &args.manifest {
        config_from_manifest(path)?
    } else {
        let id = args.problem.expect("clap enforces a source");
        match args.preset {
            Preset::Paper => paper_preset(id, args.variant, false),
            Preset::Default => ExperimentConfig::new(id, args.variant),
        }
    };
    args.overrides.apply(&mut c);
    c.validate()?;
    Ok(c)
}

fn run_command(args: RunArgs) -> Result<String, HarnessError> {
    let config = run_config(&args)?;
    prepare_output(&args.out)?;
    let result = run_batch(&config)?;
    emit_reports(&args.out, &result)?;
    if result.records.is_empty() {
        return Err(HarnessError::AllRunsFailed(result.failures.len()));
    }
    Ok(crate::report::summary_text(&result, &wrfss_cec2010::known_reference_values(config.experiment.problem)))
}

fn batch_command(args: BatchArgs) -> Result<String, HarnessError> {
    let problems = if args.problems.is_empty() { BenchId::ALL.to_vec() } else { args.problems };
    let variants = if args.variants.is_empty() { VariantKind::ALL.to_vec() } else { args.variants };
    let mut configs = Vec::new();
    for &id in &problems {
        for &v in &variants {
            let mut c = paper_preset(id, v, false);
            args.overrides.apply(&mut c);
            c.validate()?;
            let dir = args.out.join(format!("{id}_{}", v.name()));
            prepare_output(&dir)?;
            configs.push((c, dir));
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "{:<6}{:<8}{:>10}{:>16}{:>16}", "id", "variant", "feasible", "mean fitness", "mean violation");
    for (c, dir) in configs {
        let result = run_batch(&c)?;
        emit_reports(&dir, &result)?;
        let s = &result.stats;
        let cell = |m: &Option<crate::stats::Moments>| m.map_or_else(|| "-".into(), |m| sci(m.mean, 3));
        let _ = writeln!(
            out,
            "{:<6}{:<8}{:>10}{:>16}{:>16}",
            c.experiment.problem,
            c.experiment.variant.label(),
            format!("{}/{}", s.feasible_runs, s.completed),
            cell(&s.fitness),
            cell(&s.violation)
        );
    }
    let grid = args.out.join("grid.txt");
    std::fs::write(&grid, &out).map_err(|source| HarnessError::Io { path: grid, source })?;
    Ok(out)
}

fn table1(args: Table1Args) -> Result<String, HarnessError> {
    if args.samples == 0 {
        return Err(HarnessError::Config("--samples must be positive".into()));
    }
    let problems = if args.problems.is_empty() { BenchId::ALL.to_vec() } else { args.problems };
    let mut out = String::new();
    let _ = writeln!(out, "{:<6}{:>22}{:>12}{:>12}  data", "id", "search space", "published", "estimate");
    for id in problems {
        let bench = load_from_env(id)?;
        let m = id.metadata();
        let ratio = feasible_ratio(&bench.problem, args.samples, args.seed);
        let _ = writeln!(
            out,
            "{:<6}{:>22}{:>12.6}{:>12.6}  {}",
            id,
            format!("[{};{}]^10", m.lower, m.upper),
            m.feasible_ratio,
            ratio,
            bench.source
        );
    }
    Ok(out)
}

fn presets(args: PresetArgs) -> String {
    let mut out = String::new();
    if !args.toml {
        let _ = writeln!(
            out,
            "{:<6}{:<8}{:>7}{:>7}{:>7}{:>7}{:>7}{:>6}{:>8}",
            "id", "variant", "sigma", "tau", "T_c", "cp_min", "P_g", "K", "iters"
        );
    }
    for c in all_presets(args.desk) {
        let v = c.experiment.variant;
        if args.toml {
            let _ = writeln!(out, "# {} {}\n{}", c.experiment.problem, v.label(), c.to_toml());
            continue;
        }
        let pct = |x: f64| format!("{}%", (x * 100.0).round());
        let (tc, cp) = match v {
            VariantKind::Epsilon => (pct(c.epsilon.control_fraction), c.epsilon.cp_min.to_string()),
            _ => ("-".into(), "-".into()),
        };
        let (pg, k) = match v {
            VariantKind::Gradient => (pct(c.probe.probability), c.probe.directions.to_string()),
            _ => ("-".into(), "-".into()),
        };
        let _ = writeln!(
            out,
            "{:<6}{:<8}{:>7}{:>7}{:>7}{:>7}{:>7}{:>6}{:>8}",
            c.experiment.problem,
            v.label(),
            pct(c.engine.sigma),
            pct(c.engine.tau),
            tc,
            cp,
            pg,
            k,
            c.engine.iterations
        );
    }
    out
}
