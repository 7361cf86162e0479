//! Experiment configuration, read from and written to TOML.
//!
//! Every engine default can be overridden. Percentages are stored as
//! fractions (`sigma = 0.05` is 5%).
//!
//! ```toml
//! [experiment]
//! problem = "C01"
//! variant = "wrfss"
//! runs = 30
//! base_seed = 1
//!
//! [engine]
//! iterations = 80000
//! sigma = 0.05
//! tau = 0.01
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wrfss::engine::{EngineParams, EpsilonSettings, EpsilonStart, Variant, VariantKind};
use wrfss::fss::{SarSchedule, StepSizes};
use wrfss::ProbeConfig;
use wrfss_cec2010::BenchId;

use crate::error::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub engine: EngineSection,
    #[serde(default)]
    pub epsilon: EpsilonSection,
    #[serde(default)]
    pub probe: ProbeSection,
    #[serde(default)]
    pub problem: ProblemSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub problem: BenchId,
    pub variant: VariantKind,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_seed")]
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_runs() -> usize {
    30
}

fn default_seed() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineSection {
    pub school_size: usize,
    pub iterations: u64,
    pub sigma: f64,
    pub tau: f64,
    pub w_scale: f64,
    pub step_individual_initial: f64,
    pub step_individual_final: f64,
    pub step_volitive_initial: f64,
    pub step_volitive_final: f64,
    pub sar_initial: f64,
    pub sar_decay: f64,
    pub feeding: bool,
}

impl Default for EngineSection {
    fn default() -> Self {
        let p = EngineParams::default();
        Self {
            school_size: p.school_size,
            iterations: p.iterations,
            sigma: p.sigma,
            tau: p.tau,
            w_scale: p.w_scale,
            step_individual_initial: p.steps_initial.individual,
            step_individual_final: p.steps_final.individual,
            step_volitive_initial: p.steps_initial.volitive,
            step_volitive_final: p.steps_final.volitive,
            sar_initial: p.sar.initial,
            sar_decay: p.sar.decay,
            feeding: p.feeding,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpsilonSection {
    /// `T_c` as a fraction of the iteration budget.
    pub control_fraction: f64,
    pub cp_min: f64,
    /// Fixed starting level; absent means derived from the initial school.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<f64>,
}

impl Default for EpsilonSection {
    fn default() -> Self {
        let e = EpsilonSettings::default();
        Self {
            control_fraction: e.control_fraction,
            cp_min: e.cp_min,
            initial: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSection {
    pub probability: f64,
    pub directions: usize,
    pub perturbation: f64,
}

impl Default for ProbeSection {
    fn default() -> Self {
        let p = ProbeConfig::default();
        Self {
            probability: p.probability,
            directions: p.directions,
            perturbation: p.perturbation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemSection {
    pub delta: f64,
    pub exponent: f64,
}

impl Default for ProblemSection {
    fn default() -> Self {
        Self {
            delta: wrfss_cec2010::EQUALITY_TOLERANCE,
            exponent: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn new(problem: BenchId, variant: VariantKind) -> Self {
        Self {
            experiment: ExperimentSection {
                problem,
                variant,
                runs: default_runs(),
                base_seed: default_seed(),
                output: None,
            },
            engine: EngineSection::default(),
            epsilon: EpsilonSection::default(),
            probe: ProbeSection::default(),
            problem: ProblemSection::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn engine_params(&self) -> EngineParams {
        let e = &self.engine;
        EngineParams {
            school_size: e.school_size,
            iterations: e.iterations,
            sigma: e.sigma,
            tau: e.tau,
            w_scale: e.w_scale,
            steps_initial: StepSizes {
                individual: e.step_individual_initial,
                volitive: e.step_volitive_initial,
            },
            steps_final: StepSizes {
                individual: e.step_individual_final,
                volitive: e.step_volitive_final,
            },
            sar: SarSchedule {
                initial: e.sar_initial,
                decay: e.sar_decay,
            },
            feeding: e.feeding,
        }
    }

    pub fn variant(&self) -> Result<Variant, HarnessError> {
        Ok(match self.experiment.variant {
            VariantKind::Base => Variant::Base,
            VariantKind::Penalty => Variant::Penalty,
            VariantKind::Epsilon => Variant::Epsilon(EpsilonSettings {
                control_fraction: self.epsilon.control_fraction,
                cp_min: self.epsilon.cp_min,
                start: self.epsilon.initial.map_or(EpsilonStart::FromSchool, EpsilonStart::Fixed),
            }),
            VariantKind::Gradient => Variant::Gradient(
                ProbeConfig::new(self.probe.directions, self.probe.perturbation, self.probe.probability)
                    .map_err(|e| HarnessError::Config(e.to_string()))?,
            ),
        })
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |msg: String| Err(HarnessError::Config(msg));
        if self.experiment.runs == 0 {
            return invalid("experiment.runs must be positive".into());
        }
        self.engine_params()
            .validate()
            .map_err(|e| HarnessError::Config(format!("engine: {e}")))?;
        ProbeConfig::new(self.probe.directions, self.probe.perturbation, self.probe.probability)
            .map_err(|e| HarnessError::Config(format!("probe: {e}")))?;
        self.variant()?;
        if !(0.0..=1.0).contains(&self.epsilon.control_fraction) {
            return invalid(format!("epsilon.control_fraction must lie in [0, 1], got {}", self.epsilon.control_fraction));
        }
        if !(self.problem.delta > 0.0) {
            return invalid(format!("problem.delta must be positive, got {}", self.problem.delta));
        }
        if !(self.problem.exponent > 0.0) {
            return invalid(format!("problem.exponent must be positive, got {}", self.problem.exponent));
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.experiment.runs as u64).map(|i| self.experiment.base_seed.wrapping_add(i))
    }
}
