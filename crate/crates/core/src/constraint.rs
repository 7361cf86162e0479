//! Comparators and schedules for constrained search.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::problem::Evaluation;

/// Search phase of the constrained engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    /// Minimize constraint violation.
    Feasibility,
    /// Minimize the (possibly penalized) fitness.
    Fitness,
}

impl Phase {
    pub fn number(self) -> u8 {
        match self {
            Phase::Feasibility => 1,
            Phase::Fitness => 2,
        }
    }
}

/// Scalar quantity a phase minimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    Violation,
    Fitness,
    Penalized,
}

impl Objective {
    pub fn value(self, e: &Evaluation) -> f64 {
        match self {
            Objective::Violation => e.violation,
            Objective::Fitness => e.fitness,
            Objective::Penalized => penalized_fitness(e),
        }
    }
}

/// Rule deciding whether a candidate replaces the current position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Acceptance {
    /// Strict improvement of a scalar objective.
    Objective(Objective),
    /// Candidate `<_eps` current. `objective` still defines the score delta.
    Epsilon { level: f64, objective: Objective },
}

impl Acceptance {
    pub fn objective(&self) -> Objective {
        match *self {
            Acceptance::Objective(o) | Acceptance::Epsilon { objective: o, .. } => o,
        }
    }

    pub fn improves(&self, candidate: &Evaluation, current: &Evaluation) -> bool {
        match *self {
            Acceptance::Objective(o) => o.value(candidate) < o.value(current),
            Acceptance::Epsilon { level, .. } => epsilon_less(candidate, current, level),
        }
    }

    /// Improvement of the score, positive when the candidate is better.
    pub fn delta(&self, candidate: &Evaluation, current: &Evaluation) -> f64 {
        let o = self.objective();
        o.value(current) - o.value(candidate)
    }
}

/// Ordering used to rank two evaluations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Comparator {
    FitnessOnly,
    Deb,
    Epsilon(f64),
    Penalty,
}

impl Comparator {
    /// `true` iff `a` is strictly better than `b`.
    pub fn better(&self, a: &Evaluation, b: &Evaluation) -> bool {
        match *self {
            Comparator::FitnessOnly => a.fitness < b.fitness,
            Comparator::Deb => deb_better(a, b),
            Comparator::Epsilon(eps) => epsilon_less(a, b, eps),
            Comparator::Penalty => penalized_fitness(a) < penalized_fitness(b),
        }
    }
}

/// Deb's feasibility rules: feasible beats infeasible, feasibles compare by
/// fitness and infeasibles by violation. Equal violations fall back to
/// fitness so the relation stays a strict weak order.
pub fn deb_better(a: &Evaluation, b: &Evaluation) -> bool {
    match (a.feasible, b.feasible) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => a.fitness < b.fitness,
        (false, false) => {
            a.violation < b.violation || (a.violation == b.violation && a.fitness < b.fitness)
        }
    }
}

/// Strict epsilon comparison `a <_eps b`. `eps = f64::INFINITY` compares by
/// fitness alone, `eps = 0` reproduces [`deb_better`].
pub fn epsilon_less(a: &Evaluation, b: &Evaluation, eps: f64) -> bool {
    if (a.violation <= eps && b.violation <= eps) || a.violation == b.violation {
        a.fitness < b.fitness
    } else {
        a.violation < b.violation
    }
}

/// Non-strict epsilon comparison `a <=_eps b`.
pub fn epsilon_less_equal(a: &Evaluation, b: &Evaluation, eps: f64) -> bool {
    if (a.violation <= eps && b.violation <= eps) || a.violation == b.violation {
        a.fitness <= b.fitness
    } else {
        a.violation <= b.violation
    }
}

pub fn penalized_fitness(e: &Evaluation) -> f64 {
    e.fitness + e.violation
}

/// Initial epsilon level: half of (mean violation + minimum violation) of the
/// initial school.
pub fn epsilon_zero(violations: &[f64]) -> Result<f64, ParamError> {
    if violations.is_empty() {
        return Err(ParamError::new("violations", "empty initial school"));
    }
    let mean = violations.iter().sum::<f64>() / violations.len() as f64;
    let min = violations.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(0.5 * (mean + min))
}

/// Polynomially decaying epsilon level, zero from `control_iterations` on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    initial: f64,
    control_iterations: u64,
    exponent: f64,
}

impl EpsilonSchedule {
    /// `cp = max(cp_min, (-5 - log10 eps0) / log10 0.05)`; when `eps0 = 0`
    /// the exponent is `cp_min` and the schedule is identically zero.
    pub fn new(initial: f64, control_iterations: u64, cp_min: f64) -> Result<Self, ParamError> {
        if !(initial >= 0.0) || initial.is_infinite() {
            return Err(ParamError::new("epsilon0", format!("must be finite and >= 0, got {initial}")));
        }
        if !cp_min.is_finite() {
            return Err(ParamError::new("cp_min", format!("must be finite, got {cp_min}")));
        }
        let exponent = if initial > 0.0 {
            cp_min.max((-5.0 - initial.log10()) / 0.05f64.log10())
        } else {
            cp_min
        };
        Ok(Self {
            initial,
            control_iterations,
            exponent,
        })
    }

    /// Schedule with an explicit exponent.
    pub fn with_exponent(initial: f64, control_iterations: u64, exponent: f64) -> Self {
        Self {
            initial,
            control_iterations,
            exponent,
        }
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn control_iterations(&self) -> u64 {
        self.control_iterations
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn at(&self, t: u64) -> f64 {
        if t >= self.control_iterations {
            0.0
        } else if t == 0 {
            self.initial
        } else {
            let ratio = 1.0 - t as f64 / self.control_iterations as f64;
            self.initial * ratio.powf(self.exponent)
        }
    }
}

/// Running minimum and maximum of an objective over the whole search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunningExtremes {
    pub min: f64,
    pub max: f64,
}

impl Default for RunningExtremes {
    fn default() -> Self {
        Self {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
}

impl RunningExtremes {
    pub fn observe(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }

    pub fn observe_all(&mut self, values: impl IntoIterator<Item = f64>) {
        for v in values {
            self.observe(v);
        }
    }
}

/// Weight of a fish from its objective value relative to the running
/// extremes: the minimum maps to `w_scale`, the maximum to 1.
pub fn normalized_weight(value: f64, extremes: RunningExtremes, w_scale: f64) -> f64 {
    let span = extremes.max - extremes.min;
    if !(span > 0.0) || !span.is_finite() {
        return w_scale / 2.0;
    }
    let frac = ((value - extremes.min) / span).clamp(0.0, 1.0);
    if frac == 1.0 {
        return 1.0;
    }
    (w_scale + (1.0 - w_scale) * frac).clamp(1.0, w_scale)
}

pub fn normalized_feeding(values: &[f64], extremes: RunningExtremes, w_scale: f64) -> Vec<f64> {
    values
        .iter()
        .map(|&v| normalized_weight(v, extremes, w_scale))
        .collect()
}
