//! Base Fish School Search operators.
//!
//! All operators minimize. The quantity driving acceptance is chosen by an
//! [`Acceptance`] rule so the constrained engine can swap it per phase.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constraint::Acceptance;
use crate::error::ParamError;
use crate::problem::{Evaluation, Evaluator, Interval, ProblemError};

#[derive(Clone, Debug, PartialEq)]
pub struct Fish {
    pub position: Vec<f64>,
    pub weight: f64,
    /// Displacement applied by the last individual movement, zero if rejected.
    pub displacement: Vec<f64>,
    /// Score improvement of the last individual movement.
    pub delta_score: f64,
    pub eval: Evaluation,
}

impl Fish {
    pub fn new(position: Vec<f64>, eval: Evaluation, weight: f64) -> Self {
        let d = position.len();
        Self {
            position,
            weight,
            displacement: vec![0.0; d],
            delta_score: 0.0,
            eval,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSizes {
    pub individual: f64,
    pub volitive: f64,
}

/// Linearly decaying individual and volitive steps, as fractions of each
/// dimension's range.
///
/// A boost rescales the current values in place; decay then continues
/// linearly from the boosted values to the original final values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    initial: StepSizes,
    last: StepSizes,
    iterations: u64,
    anchor_iteration: u64,
    anchor: StepSizes,
}

impl StepSchedule {
    pub fn new(initial: StepSizes, last: StepSizes, iterations: u64) -> Result<Self, ParamError> {
        for (name, a, b) in [
            ("step_ind", initial.individual, last.individual),
            ("step_vol", initial.volitive, last.volitive),
        ] {
            if !(a >= b && b >= 0.0) || !a.is_finite() {
                return Err(ParamError::new(name, format!("need initial >= final >= 0, got {a} -> {b}")));
            }
        }
        if iterations == 0 {
            return Err(ParamError::new("iterations", "must be positive"));
        }
        Ok(Self {
            initial,
            last,
            iterations,
            anchor_iteration: 0,
            anchor: initial,
        })
    }

    pub fn initial(&self) -> StepSizes {
        self.initial
    }

    pub fn last(&self) -> StepSizes {
        self.last
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn at(&self, t: u64) -> StepSizes {
        if t >= self.iterations {
            return self.last;
        }
        let t = t.max(self.anchor_iteration);
        let frac = (t - self.anchor_iteration) as f64
            / (self.iterations - self.anchor_iteration) as f64;
        let lerp = |a: f64, b: f64| a + (b - a) * frac;
        StepSizes {
            individual: lerp(self.anchor.individual, self.last.individual),
            volitive: lerp(self.anchor.volitive, self.last.volitive),
        }
    }

    /// Multiplies the step values at iteration `t` by `factor`.
    pub fn boost(&mut self, t: u64, factor: f64) {
        if t >= self.iterations {
            return;
        }
        let now = self.at(t);
        self.anchor_iteration = t;
        self.anchor = StepSizes {
            individual: now.individual * factor,
            volitive: now.volitive * factor,
        };
    }
}

/// Scales a range fraction to an absolute step for every dimension.
pub fn per_dimension(fraction: f64, bounds: &[Interval]) -> Vec<f64> {
    bounds.iter().map(|b| fraction * b.width()).collect()
}

/// Stagnation avoidance: probability `initial * exp(-decay * t)` of accepting
/// a non-improving individual move.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SarSchedule {
    pub initial: f64,
    pub decay: f64,
}

impl Default for SarSchedule {
    fn default() -> Self {
        Self {
            initial: 0.8,
            decay: 0.007,
        }
    }
}

impl SarSchedule {
    pub fn disabled() -> Self {
        Self {
            initial: 0.0,
            decay: 0.0,
        }
    }

    pub fn at(&self, t: u64) -> f64 {
        (self.initial * (-self.decay * t as f64).exp()).clamp(0.0, 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveOutcome {
    pub accepted: bool,
    pub improved: bool,
}

/// Evaluates `candidate` and moves the fish there if it improves under
/// `acceptance`, or with probability `sar_alpha` when it does not.
pub fn try_candidate<R: Rng + ?Sized>(
    fish: &mut Fish,
    candidate: Vec<f64>,
    evaluator: &Evaluator<'_>,
    acceptance: &Acceptance,
    sar_alpha: f64,
    rng: &mut R,
) -> Result<MoveOutcome, ProblemError> {
    let eval = evaluator.evaluate(&candidate)?;
    let improved = acceptance.improves(&eval, &fish.eval);
    let accepted = improved || (sar_alpha > 0.0 && rng.random::<f64>() < sar_alpha);
    if accepted {
        for ((d, c), x) in fish.displacement.iter_mut().zip(&candidate).zip(&fish.position) {
            *d = c - x;
        }
        fish.delta_score = acceptance.delta(&eval, &fish.eval);
        fish.position = candidate;
        fish.eval = eval;
    } else {
        fish.displacement.iter_mut().for_each(|d| *d = 0.0);
        fish.delta_score = 0.0;
    }
    Ok(MoveOutcome { accepted, improved })
}

/// Random local probe `x + U(-1, 1) * step`, drawn per dimension.
pub fn individual_movement<R: Rng + ?Sized>(
    fish: &mut Fish,
    evaluator: &Evaluator<'_>,
    step: &[f64],
    acceptance: &Acceptance,
    sar_alpha: f64,
    rng: &mut R,
) -> Result<MoveOutcome, ProblemError> {
    let problem = evaluator.problem();
    let mut candidate: Vec<f64> = fish
        .position
        .iter()
        .zip(step)
        .map(|(x, s)| x + rng.random_range(-1.0..=1.0) * s)
        .collect();
    problem.clamp_in_place(&mut candidate);
    try_candidate(fish, candidate, evaluator, acceptance, sar_alpha, rng)
}

#[derive(Clone, Debug, PartialEq)]
pub struct School {
    pub fishes: Vec<Fish>,
    total_weight: f64,
    previous_total_weight: f64,
}

impl School {
    pub fn new(fishes: Vec<Fish>) -> Self {
        let total: f64 = fishes.iter().map(|f| f.weight).sum();
        Self {
            fishes,
            total_weight: total,
            previous_total_weight: total,
        }
    }

    pub fn len(&self) -> usize {
        self.fishes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fishes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn previous_total_weight(&self) -> f64 {
        self.previous_total_weight
    }

    pub fn weight_increased(&self) -> bool {
        self.total_weight > self.previous_total_weight
    }

    pub fn weights(&self) -> Vec<f64> {
        self.fishes.iter().map(|f| f.weight).collect()
    }

    /// Assigns new weights and rolls the total-weight bookkeeping.
    pub fn set_weights(&mut self, weights: &[f64]) {
        for (f, &w) in self.fishes.iter_mut().zip(weights) {
            f.weight = w;
        }
        self.roll_total();
    }

    /// Marks the start of a new feeding step without changing weights.
    pub fn roll_total(&mut self) {
        self.previous_total_weight = self.total_weight;
        self.total_weight = self.fishes.iter().map(|f| f.weight).sum();
    }

    pub fn feasible_count(&self) -> usize {
        self.fishes.iter().filter(|f| f.eval.feasible).count()
    }

    /// Weighted mean position.
    pub fn barycenter(&self) -> Vec<f64> {
        let d = self.fishes.first().map_or(0, |f| f.position.len());
        let mut b = vec![0.0; d];
        let mut total = 0.0;
        for f in &self.fishes {
            total += f.weight;
            for (bk, xk) in b.iter_mut().zip(&f.position) {
                *bk += xk * f.weight;
            }
        }
        if total > 0.0 {
            b.iter_mut().for_each(|v| *v /= total);
        }
        b
    }
}

/// Classic feeding: `W += df / max |df|`, clipped to `[1, w_scale]`.
pub fn feeding(school: &mut School, w_scale: f64) {
    let max_abs = school
        .fishes
        .iter()
        .map(|f| f.delta_score.abs())
        .fold(0.0, f64::max);
    if max_abs > 0.0 {
        for f in &mut school.fishes {
            f.weight = (f.weight + f.delta_score / max_abs).clamp(1.0, w_scale);
        }
    }
    school.roll_total();
}

/// Improvement-weighted mean of the last individual displacements.
pub fn instinctive_vector(fishes: &[Fish]) -> Vec<f64> {
    let d = fishes.first().map_or(0, |f| f.position.len());
    let mut num = vec![0.0; d];
    let mut den = 0.0;
    for f in fishes {
        den += f.delta_score;
        for (n, dx) in num.iter_mut().zip(&f.displacement) {
            *n += dx * f.delta_score;
        }
    }
    if den == 0.0 {
        return vec![0.0; d];
    }
    num.iter_mut().for_each(|v| *v /= den);
    num
}

pub fn collective_instinctive(school: &mut School, bounds: &[Interval]) -> Vec<f64> {
    let drift = instinctive_vector(&school.fishes);
    for f in &mut school.fishes {
        for ((x, i), b) in f.position.iter_mut().zip(&drift).zip(bounds) {
            *x = b.clamp(*x + i);
        }
    }
    drift
}

/// Moves `position` toward `center` (`attract`) or away from it by
/// `step * U(0, 1)` per dimension along the unit direction. No move when the
/// point sits on the center.
pub fn volitive_move<R: Rng + ?Sized>(
    position: &mut [f64],
    center: &[f64],
    step: &[f64],
    attract: bool,
    bounds: &[Interval],
    rng: &mut R,
) {
    let dist = position
        .iter()
        .zip(center)
        .map(|(x, c)| (x - c) * (x - c))
        .sum::<f64>()
        .sqrt();
    if dist == 0.0 {
        return;
    }
    let sign = if attract { -1.0 } else { 1.0 };
    for (((x, c), s), b) in position.iter_mut().zip(center).zip(step).zip(bounds) {
        let r: f64 = rng.random();
        *x = b.clamp(*x + sign * s * r * (*x - c) / dist);
    }
}

/// Contraction toward (weight increased) or expansion away from the school
/// barycenter. `rng_for(i)` supplies fish `i`'s random stream.
pub fn collective_volitive<R, G>(
    school: &mut School,
    step: &[f64],
    bounds: &[Interval],
    mut rng_for: G,
) -> Vec<f64>
where
    R: Rng,
    G: FnMut(usize) -> R,
{
    let center = school.barycenter();
    let attract = school.weight_increased();
    for (i, f) in school.fishes.iter_mut().enumerate() {
        let mut rng = rng_for(i);
        volitive_move(&mut f.position, &center, step, attract, bounds, &mut rng);
    }
    center
}
