//! The two-phase constrained engine and its variants.
//!
//! Each iteration decides the phase from the feasible proportion of the
//! school, runs the individual movement with the variant's acceptance rule,
//! feeds the school by normalizing the phase objective, refreshes the leader
//! links, and applies the leader-aware instinctive and volitive movements.
//! The best fish is tracked across the whole run with Deb's rules.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraint::{
    deb_better, epsilon_zero, normalized_feeding, Acceptance, EpsilonSchedule, Objective, Phase,
    RunningExtremes,
};
use crate::error::ParamError;
use crate::fss::{individual_movement, per_dimension, Fish, SarSchedule, School, StepSchedule, StepSizes};
use crate::gradient::{probe_move, ProbeConfig};
use crate::problem::{Evaluation, Evaluator, Problem, ProblemError};
use crate::rng::{substream, Purpose};
use crate::wfss::{leader_instinctive, leader_volitive, link_formator, LinkGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantKind {
    #[serde(rename = "wrfss")]
    Base,
    #[serde(rename = "wrfsse")]
    Epsilon,
    #[serde(rename = "wrfssg")]
    Gradient,
    #[serde(rename = "wrfssp")]
    Penalty,
}

impl VariantKind {
    pub const ALL: [VariantKind; 4] = [
        VariantKind::Base,
        VariantKind::Epsilon,
        VariantKind::Gradient,
        VariantKind::Penalty,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VariantKind::Base => "wrfss",
            VariantKind::Epsilon => "wrfsse",
            VariantKind::Gradient => "wrfssg",
            VariantKind::Penalty => "wrfssp",
        }
    }

    /// Display label, e.g. `wrFSSe`.
    pub fn label(self) -> &'static str {
        match self {
            VariantKind::Base => "wrFSS",
            VariantKind::Epsilon => "wrFSSe",
            VariantKind::Gradient => "wrFSSg",
            VariantKind::Penalty => "wrFSSp",
        }
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for VariantKind {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VariantKind::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ParamError::new("variant", format!("unknown variant `{s}`")))
    }
}

/// Where the epsilon level starts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonStart {
    /// Half of (mean + min) violation of the initial school.
    FromSchool,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSettings {
    /// `T_c` as a fraction of the iteration budget.
    pub control_fraction: f64,
    pub cp_min: f64,
    pub start: EpsilonStart,
}

impl Default for EpsilonSettings {
    fn default() -> Self {
        Self {
            control_fraction: 0.6,
            cp_min: 3.0,
            start: EpsilonStart::FromSchool,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Variant {
    Base,
    Epsilon(EpsilonSettings),
    Gradient(ProbeConfig),
    Penalty,
}

impl Variant {
    pub fn kind(&self) -> VariantKind {
        match self {
            Variant::Base => VariantKind::Base,
            Variant::Epsilon(_) => VariantKind::Epsilon,
            Variant::Gradient(_) => VariantKind::Gradient,
            Variant::Penalty => VariantKind::Penalty,
        }
    }

    /// Objective minimized in `phase`.
    pub fn objective(&self, phase: Phase) -> Objective {
        match (phase, self) {
            (Phase::Feasibility, _) => Objective::Violation,
            (Phase::Fitness, Variant::Penalty) => Objective::Penalized,
            (Phase::Fitness, _) => Objective::Fitness,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    pub school_size: usize,
    pub iterations: u64,
    /// Feasible proportion at which the fitness phase starts.
    pub sigma: f64,
    /// Step increase applied on every feasibility -> fitness transition.
    pub tau: f64,
    pub w_scale: f64,
    pub steps_initial: StepSizes,
    pub steps_final: StepSizes,
    pub sar: SarSchedule,
    /// When false, weights stay at `w_scale / 2`.
    pub feeding: bool,
}

impl Default for EngineParams {
    fn default() -> Self {
        Self {
            school_size: 30,
            iterations: 5000,
            sigma: 0.05,
            tau: 0.01,
            w_scale: 5000.0,
            steps_initial: StepSizes {
                individual: 0.1,
                volitive: 0.2,
            },
            steps_final: StepSizes {
                individual: 1e-4,
                volitive: 2e-4,
            },
            sar: SarSchedule::default(),
            feeding: true,
        }
    }
}

impl EngineParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.school_size == 0 {
            return Err(ParamError::new("school_size", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.sigma) {
            return Err(ParamError::new("sigma", format!("must lie in [0, 1], got {}", self.sigma)));
        }
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(ParamError::new("tau", format!("must be >= 0, got {}", self.tau)));
        }
        if !(self.w_scale > 1.0) || !self.w_scale.is_finite() {
            return Err(ParamError::new("w_scale", format!("must exceed 1, got {}", self.w_scale)));
        }
        if !(0.0..=1.0).contains(&self.sar.initial) || !(self.sar.decay >= 0.0) {
            return Err(ParamError::new("sar", "initial must lie in [0, 1] and decay be >= 0"));
        }
        StepSchedule::new(self.steps_initial, self.steps_final, self.iterations.max(1))?;
        Ok(())
    }
}

pub fn decide_phase(school: &School, sigma: f64) -> Phase {
    phase_for(school.feasible_count(), school.len(), sigma)
}

fn phase_for(feasible: usize, n: usize, sigma: f64) -> Phase {
    if n > 0 && feasible as f64 / n as f64 >= sigma {
        Phase::Fitness
    } else {
        Phase::Feasibility
    }
}

/// Multiplies the current steps by `1 + tau`.
pub fn apply_tau_boost(schedule: &mut StepSchedule, t: u64, tau: f64) {
    schedule.boost(t, 1.0 + tau);
}

/// Phase state machine with the once-per-transition step boost.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseController {
    sigma: f64,
    tau: f64,
    current: Option<Phase>,
    transitions: u64,
}

impl PhaseController {
    pub fn new(sigma: f64, tau: f64) -> Self {
        Self {
            sigma,
            tau,
            current: None,
            transitions: 0,
        }
    }

    pub fn phase(&self) -> Option<Phase> {
        self.current
    }

    /// Number of feasibility -> fitness transitions so far.
    pub fn transitions(&self) -> u64 {
        self.transitions
    }

    /// Decides the phase of iteration `t`, boosting `schedule` if the search
    /// just left the feasibility phase.
    pub fn advance(&mut self, school: &School, t: u64, schedule: &mut StepSchedule) -> Phase {
        let phase = decide_phase(school, self.sigma);
        if self.current == Some(Phase::Feasibility) && phase == Phase::Fitness {
            apply_tau_boost(schedule, t, self.tau);
            self.transitions += 1;
        }
        self.current = Some(phase);
        phase
    }
}

/// Index of the Deb-best fish.
pub fn best_fish(school: &School) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, f) in school.fishes.iter().enumerate() {
        match best {
            Some(b) if !deb_better(&f.eval, &school.fishes[b].eval) => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Historical best under Deb's rules.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BestTracker {
    best: Option<(Evaluation, Vec<f64>)>,
}

impl BestTracker {
    pub fn merge(&mut self, school: &School) -> Option<Evaluation> {
        if let Some(i) = best_fish(school) {
            let f = &school.fishes[i];
            let replace = match &self.best {
                None => true,
                Some((e, _)) => deb_better(&f.eval, e),
            };
            if replace {
                self.best = Some((f.eval, f.position.clone()));
            }
        }
        self.best()
    }

    pub fn best(&self) -> Option<Evaluation> {
        self.best.as_ref().map(|(e, _)| *e)
    }

    pub fn position(&self) -> Option<&[f64]> {
        self.best.as_ref().map(|(_, x)| x.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: u64,
    pub best_fitness: f64,
    pub best_violation: f64,
    pub phase: u8,
    pub feasible_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub variant: VariantKind,
    pub school_size: usize,
    pub iterations: u64,
    /// Row `t` is the state at the start of iteration `t`; row 0 is the
    /// initial school.
    pub trace: Vec<TraceRow>,
    pub best: Evaluation,
    pub best_position: Vec<f64>,
    pub evaluations: u64,
    /// Individual movements that used the gradient probe.
    pub probes: u64,
    pub phase_transitions: u64,
    pub epsilon0: Option<f64>,
    pub wall_time_secs: f64,
}

impl RunRecord {
    /// Evaluations implied by the configuration: one per fish at start, then
    /// per iteration one candidate and one re-evaluation per fish plus `D`
    /// extra for every gradient probe (`D + 1` violation calls replace none
    /// of the candidate calls).
    pub fn expected_evaluations(&self, dimension: usize) -> u64 {
        let n = self.school_size as u64;
        n + self.iterations * 2 * n + self.probes * (dimension as u64 + 1)
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("evaluation failed at iteration {iteration}, fish {fish}: {source}")]
    Evaluation {
        iteration: u64,
        fish: usize,
        #[source]
        source: ProblemError,
    },
}

/// Read-only view handed to observers after each iteration.
pub struct IterationView<'a> {
    pub iteration: u64,
    pub phase: Phase,
    pub school: &'a School,
    pub links: &'a LinkGraph,
}

pub fn run(problem: &Problem, variant: &Variant, params: &EngineParams, seed: u64) -> Result<RunRecord, EngineError> {
    run_observed(problem, variant, params, seed, |_| {})
}

pub fn run_observed<O>(
    problem: &Problem,
    variant: &Variant,
    params: &EngineParams,
    seed: u64,
    mut observer: O,
) -> Result<RunRecord, EngineError>
where
    O: FnMut(&IterationView<'_>),
{
    params.validate()?;
    if let Variant::Epsilon(s) = variant {
        if !(0.0..=1.0).contains(&s.control_fraction) {
            return Err(ParamError::new("T_c", format!("fraction must lie in [0, 1], got {}", s.control_fraction)).into());
        }
    }
    let started = Instant::now();
    let bounds = problem.bounds();
    let n = params.school_size;
    let evaluator = Evaluator::new(problem);
    let eval_err = |iteration, fish| move |source| EngineError::Evaluation { iteration, fish, source };

    let mut fishes = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = substream(seed, Purpose::Init, 0, i as u64);
        let x: Vec<f64> = bounds
            .iter()
            .map(|b| b.lower + rng.random::<f64>() * b.width())
            .collect();
        let e = evaluator.evaluate(&x).map_err(eval_err(0, i))?;
        fishes.push(Fish::new(x, e, params.w_scale / 2.0));
    }
    let mut school = School::new(fishes);
    let mut links = LinkGraph::new(n);
    let mut schedule = StepSchedule::new(params.steps_initial, params.steps_final, params.iterations.max(1))?;
    let mut controller = PhaseController::new(params.sigma, params.tau);
    let mut tracker = BestTracker::default();
    let mut violation_range = RunningExtremes::default();
    let mut fitness_range = RunningExtremes::default();
    let fitness_objective = variant.objective(Phase::Fitness);
    let observe = |school: &School, v: &mut RunningExtremes, f: &mut RunningExtremes| {
        for fish in &school.fishes {
            v.observe(fish.eval.violation);
            f.observe(fitness_objective.value(&fish.eval));
        }
    };
    observe(&school, &mut violation_range, &mut fitness_range);
    tracker.merge(&school);

    let epsilon = match variant {
        Variant::Epsilon(s) => {
            let violations: Vec<f64> = school.fishes.iter().map(|f| f.eval.violation).collect();
            let eps0 = match s.start {
                EpsilonStart::FromSchool => epsilon_zero(&violations)?,
                EpsilonStart::Fixed(v) => v,
            };
            let control = (s.control_fraction * params.iterations as f64).round() as u64;
            Some(EpsilonSchedule::new(eps0, control, s.cp_min)?)
        }
        _ => None,
    };

    let mut trace = Vec::with_capacity(params.iterations as usize + 1);
    let row = |t: u64, school: &School, tracker: &BestTracker| {
        let best = tracker.best().expect("school is nonempty");
        TraceRow {
            iteration: t,
            best_fitness: best.fitness,
            best_violation: best.violation,
            phase: decide_phase(school, params.sigma).number(),
            feasible_count: school.feasible_count(),
        }
    };
    trace.push(row(0, &school, &tracker));
    let mut probes = 0u64;

    for t in 0..params.iterations {
        let phase = controller.advance(&school, t, &mut schedule);
        let steps = schedule.at(t);
        let step_ind = per_dimension(steps.individual, bounds);
        let step_vol = per_dimension(steps.volitive, bounds);
        let alpha = params.sar.at(t);
        let objective = variant.objective(phase);
        let acceptance = match &epsilon {
            Some(s) => Acceptance::Epsilon {
                level: s.at(t),
                objective,
            },
            None => Acceptance::Objective(objective),
        };

        for (i, fish) in school.fishes.iter_mut().enumerate() {
            let mut rng = substream(seed, Purpose::Individual, t, i as u64);
            match variant {
                Variant::Gradient(cfg) => {
                    let mut probe_rng = substream(seed, Purpose::Probe, t, i as u64);
                    let out = probe_move(
                        fish, &evaluator, phase, &step_ind, cfg, &acceptance, alpha, &mut rng, &mut probe_rng,
                    )
                    .map_err(eval_err(t, i))?;
                    probes += out.probed as u64;
                }
                _ => {
                    individual_movement(fish, &evaluator, &step_ind, &acceptance, alpha, &mut rng)
                        .map_err(eval_err(t, i))?;
                }
            }
        }
        tracker.merge(&school);
        observe(&school, &mut violation_range, &mut fitness_range);

        if params.feeding {
            let range = match phase {
                Phase::Feasibility => violation_range,
                Phase::Fitness => fitness_range,
            };
            let values: Vec<f64> = school.fishes.iter().map(|f| objective.value(&f.eval)).collect();
            let weights = normalized_feeding(&values, range, params.w_scale);
            school.set_weights(&weights);
        } else {
            school.roll_total();
        }

        let mut link_rng = substream(seed, Purpose::Links, t, 0);
        link_formator(&mut links, &school.weights(), &mut link_rng);

        let rho = t as f64 / params.iterations as f64;
        leader_instinctive(&mut school, &links, rho, bounds);
        let increased = school.weight_increased();
        leader_volitive(&mut school, &links, &step_vol, increased, bounds, |i| {
            substream(seed, Purpose::Volitive, t, i as u64)
        });

        for (i, fish) in school.fishes.iter_mut().enumerate() {
            fish.eval = evaluator.evaluate(&fish.position).map_err(eval_err(t, i))?;
        }
        tracker.merge(&school);
        observe(&school, &mut violation_range, &mut fitness_range);
        trace.push(row(t + 1, &school, &tracker));
        observer(&IterationView {
            iteration: t,
            phase,
            school: &school,
            links: &links,
        });
    }

    let best = tracker.best().expect("school is nonempty");
    Ok(RunRecord {
        seed,
        variant: variant.kind(),
        school_size: n,
        iterations: params.iterations,
        trace,
        best,
        best_position: tracker.position().map(<[f64]>::to_vec).unwrap_or_default(),
        evaluations: evaluator.calls(),
        probes,
        phase_transitions: controller.transitions(),
        epsilon0: epsilon.map(|s| s.initial()),
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Interval;

    fn school_with(feasible: usize, n: usize) -> School {
        School::new(
            (0..n)
                .map(|i| {
                    let phi = if i < feasible { 0.0 } else { 1.0 };
                    Fish::new(vec![0.0], Evaluation::new(i as f64, phi), 1.0)
                })
                .collect(),
        )
    }

    #[test]
    fn phase_threshold() {
        assert_eq!(decide_phase(&school_with(2, 30), 0.05), Phase::Fitness);
        assert_eq!(decide_phase(&school_with(1, 30), 0.05), Phase::Feasibility);
        assert_eq!(decide_phase(&school_with(0, 30), 0.05), Phase::Feasibility);
        assert_eq!(decide_phase(&school_with(0, 30), 0.0), Phase::Fitness);
    }

    #[test]
    fn boost_only_on_transition() {
        let mk = || {
            StepSchedule::new(
                StepSizes { individual: 0.1, volitive: 0.2 },
                StepSizes { individual: 0.0, volitive: 0.0 },
                100,
            )
            .unwrap()
        };
        let mut s = mk();
        let mut c = PhaseController::new(0.05, 0.3);
        assert_eq!(c.advance(&school_with(0, 30), 0, &mut s), Phase::Feasibility);
        assert_eq!(s, mk());
        assert_eq!(c.advance(&school_with(5, 30), 0, &mut s), Phase::Fitness);
        assert!((s.at(0).individual - 0.13).abs() < 1e-15);
        let after = s.clone();
        c.advance(&school_with(5, 30), 1, &mut s);
        assert_eq!(s, after);
        assert_eq!(c.transitions(), 1);

        let mut s = mk();
        let mut c = PhaseController::new(0.05, 0.0);
        c.advance(&school_with(0, 30), 0, &mut s);
        c.advance(&school_with(5, 30), 0, &mut s);
        assert_eq!(s.at(0).individual, 0.1);
    }

    #[test]
    fn initial_fitness_phase_is_not_a_transition() {
        let mut s = StepSchedule::new(
            StepSizes { individual: 0.1, volitive: 0.2 },
            StepSizes { individual: 0.0, volitive: 0.0 },
            100,
        )
        .unwrap();
        let mut c = PhaseController::new(0.05, 0.3);
        c.advance(&school_with(30, 30), 0, &mut s);
        assert_eq!(c.transitions(), 0);
        assert_eq!(s.at(0).individual, 0.1);
    }

    #[test]
    fn best_fish_selection() {
        let mut school = school_with(0, 3);
        school.fishes[1].eval = Evaluation::new(100.0, 0.0);
        assert_eq!(best_fish(&school), Some(1));
        let mut school = school_with(0, 3);
        school.fishes[2].eval = Evaluation::new(5.0, 0.5);
        assert_eq!(best_fish(&school), Some(2));

        let mut tracker = BestTracker::default();
        tracker.merge(&school_with(1, 3));
        let infeasible = school_with(0, 3);
        let kept = tracker.merge(&infeasible).unwrap();
        assert!(kept.feasible);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in VariantKind::ALL {
            assert_eq!(v.name().parse::<VariantKind>().unwrap(), v);
        }
        assert!("wrfssx".parse::<VariantKind>().is_err());
    }

    fn sphere(d: usize) -> Problem {
        Problem::builder(vec![Interval::new(-5.0, 5.0); d], |x| x.iter().map(|v| v * v).sum())
            .inequality(|x| 1.0 - x[0])
            .build()
            .unwrap()
    }

    #[test]
    fn zero_budget_returns_initial_best() {
        let p = sphere(3);
        let params = EngineParams {
            iterations: 0,
            ..EngineParams::default()
        };
        let r = run(&p, &Variant::Base, &params, 1).unwrap();
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.evaluations, 30);
        assert_eq!(r.best.fitness, r.trace[0].best_fitness);
    }

    #[test]
    fn evaluation_errors_abort_with_location() {
        let p = Problem::builder(vec![Interval::new(0.0, 1.0)], |x| if x[0] > 0.0 { 1.0 / 0.0 } else { 0.0 })
            .build()
            .unwrap();
        let err = run(&p, &Variant::Base, &EngineParams::default(), 1).unwrap_err();
        assert!(matches!(err, EngineError::Evaluation { iteration: 0, fish: 0, .. }), "{err}");
    }

    #[test]
    fn invalid_params_are_rejected() {
        let p = sphere(2);
        let params = EngineParams {
            sigma: 1.5,
            ..EngineParams::default()
        };
        assert!(matches!(run(&p, &Variant::Base, &params, 0), Err(EngineError::Params(_))));
    }
}
