//! Finite-difference directional probe for the individual movement.
//!
//! The violation gradient is estimated by forward differences (`D + 1`
//! evaluations), then `K` random unit directions are scored by their
//! directional derivative. In the feasibility phase the steepest descent
//! direction wins; in the fitness phase the direction along which the
//! violation changes least wins, so fish tend to stay on the feasible set.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::constraint::{Acceptance, Phase};
use crate::error::ParamError;
use crate::fss::{individual_movement, try_candidate, Fish, MoveOutcome};
use crate::problem::{Evaluator, Interval, ProblemError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Number of random directions `K`.
    pub directions: usize,
    /// Perturbation `e` as a fraction of each dimension's range.
    pub perturbation: f64,
    /// Probability `P_g` of probing instead of the plain random move.
    pub probability: f64,
}

impl ProbeConfig {
    pub fn new(directions: usize, perturbation: f64, probability: f64) -> Result<Self, ParamError> {
        if directions == 0 {
            return Err(ParamError::new("K", "need at least one direction"));
        }
        if !(perturbation > 0.0) || !perturbation.is_finite() {
            return Err(ParamError::new("e", format!("must be positive, got {perturbation}")));
        }
        if !(0.0..=1.0).contains(&probability) {
            return Err(ParamError::new("P_g", format!("must lie in [0, 1], got {probability}")));
        }
        Ok(Self {
            directions,
            perturbation,
            probability,
        })
    }
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            directions: 200,
            perturbation: 1e-6,
            probability: 0.1,
        }
    }
}

/// Forward-difference gradient with the same step `e` in every coordinate.
pub fn forward_gradient<F, E>(f: F, x: &[f64], e: f64) -> Result<Vec<f64>, E>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    forward_gradient_with_steps(f, x, &vec![e; x.len()])
}

/// Forward-difference gradient with a signed step per coordinate
/// (a negative step gives a backward difference). Calls `f` exactly
/// `x.len() + 1` times.
pub fn forward_gradient_with_steps<F, E>(mut f: F, x: &[f64], steps: &[f64]) -> Result<Vec<f64>, E>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    let base = f(x)?;
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for (j, &h) in steps.iter().enumerate() {
        probe[j] = x[j] + h;
        let shifted = f(&probe)?;
        probe[j] = x[j];
        grad.push((shifted - base) / h);
    }
    Ok(grad)
}

/// Per-coordinate steps `e * width`, flipped to backward differences where
/// the forward point would leave the box.
pub fn box_steps(x: &[f64], bounds: &[Interval], e: f64) -> Vec<f64> {
    x.iter()
        .zip(bounds)
        .map(|(&xj, b)| {
            let h = e * b.width();
            if xj + h > b.upper {
                -h
            } else {
                h
            }
        })
        .collect()
}

/// Unit vector uniform on the sphere (normalized standard normals).
pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Picks among `candidates` the direction with the smallest directional
/// derivative (feasibility phase) or the smallest absolute directional
/// derivative (fitness phase). Ties keep the earliest candidate.
pub fn select_direction(gradient: &[f64], candidates: &[Vec<f64>], phase: Phase) -> usize {
    let score = |u: &Vec<f64>| {
        let d: f64 = gradient.iter().zip(u).map(|(g, c)| g * c).sum();
        match phase {
            Phase::Feasibility => d,
            Phase::Fitness => d.abs(),
        }
    };
    let mut best = 0;
    let mut best_score = f64::INFINITY;
    for (k, u) in candidates.iter().enumerate() {
        let s = score(u);
        if s < best_score {
            best = k;
            best_score = s;
        }
    }
    best
}

/// Draws `k` random unit directions and returns the selected one.
pub fn pick_direction<R: Rng + ?Sized>(gradient: &[f64], k: usize, phase: Phase, rng: &mut R) -> Vec<f64> {
    let candidates: Vec<Vec<f64>> = (0..k.max(1))
        .map(|_| random_unit_vector(gradient.len(), rng))
        .collect();
    let idx = select_direction(gradient, &candidates, phase);
    candidates.into_iter().nth(idx).expect("at least one direction")
}

/// Gradient-guided candidate `clamp(x + step * U(0, 1) * u*)`.
///
/// Costs `D + 1` violation evaluations.
pub fn probe_candidate<R: Rng + ?Sized>(
    position: &[f64],
    evaluator: &Evaluator<'_>,
    phase: Phase,
    step: &[f64],
    config: &ProbeConfig,
    rng: &mut R,
) -> Result<Vec<f64>, ProblemError> {
    let problem = evaluator.problem();
    let steps = box_steps(position, problem.bounds(), config.perturbation);
    let grad = forward_gradient_with_steps(|x| evaluator.violation(x), position, &steps)?;
    let dir = pick_direction(&grad, config.directions, phase, rng);
    let r: f64 = rng.random();
    let mut candidate: Vec<f64> = position
        .iter()
        .zip(step)
        .zip(&dir)
        .map(|((x, s), u)| x + s * r * u)
        .collect();
    problem.clamp_in_place(&mut candidate);
    Ok(candidate)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeOutcome {
    pub probed: bool,
    pub movement: MoveOutcome,
}

/// Individual movement of the gradient variant: probes with probability
/// `P_g`, otherwise runs the plain random move on `plain_rng`. The coin, the
/// directions and the probe's acceptance draw come from `probe_rng`, so a
/// zero `P_g` leaves `plain_rng`'s sequence untouched.
#[allow(clippy::too_many_arguments)]
pub fn probe_move<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    fish: &mut Fish,
    evaluator: &Evaluator<'_>,
    phase: Phase,
    step: &[f64],
    config: &ProbeConfig,
    acceptance: &Acceptance,
    sar_alpha: f64,
    plain_rng: &mut R1,
    probe_rng: &mut R2,
) -> Result<ProbeOutcome, ProblemError> {
    let probed = config.probability > 0.0 && probe_rng.random::<f64>() < config.probability;
    let movement = if probed {
        let candidate = probe_candidate(&fish.position, evaluator, phase, step, config, probe_rng)?;
        try_candidate(fish, candidate, evaluator, acceptance, sar_alpha, probe_rng)?
    } else {
        individual_movement(fish, evaluator, step, acceptance, sar_alpha, plain_rng)?
    };
    Ok(ProbeOutcome { probed, movement })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::Objective;
    use crate::problem::Problem;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::convert::Infallible;

    fn ok(v: f64) -> Result<f64, Infallible> {
        Ok(v)
    }

    #[test]
    fn linear_gradient_is_exact() {
        let g = forward_gradient(|x| ok(2.0 * x[0] + 3.0 * x[1]), &[0.3, -1.2], 0.25).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-12 && (g[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn square_gradient_has_first_order_bias() {
        let g = forward_gradient(|x| ok(x[0] * x[0]), &[1.0], 1e-3).unwrap();
        assert!((g[0] - 2.001).abs() < 1e-9);
    }

    #[test]
    fn constant_gradient_is_zero() {
        let g = forward_gradient(|_| ok(4.0), &[1.0, 2.0, 3.0], 1e-4).unwrap();
        assert_eq!(g, vec![0.0; 3]);
    }

    #[test]
    fn gradient_call_count() {
        let mut calls = 0;
        forward_gradient(
            |x| {
                calls += 1;
                ok(x.iter().sum())
            },
            &[0.0; 7],
            1e-3,
        )
        .unwrap();
        assert_eq!(calls, 8);
    }

    #[test]
    fn direction_selection_by_phase() {
        let grad = [2.0, 3.0];
        let cands = vec![vec![1.0, 0.0], vec![0.0, -1.0]];
        assert_eq!(select_direction(&grad, &cands, Phase::Feasibility), 1);
        assert_eq!(select_direction(&grad, &cands, Phase::Fitness), 0);
        assert_eq!(select_direction(&[0.0, 0.0], &cands, Phase::Feasibility), 0);
        assert_eq!(select_direction(&[0.0, 0.0], &cands, Phase::Fitness), 0);
    }

    #[test]
    fn zero_gradient_returns_first_sample() {
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        let u = pick_direction(&[0.0; 4], 10, Phase::Feasibility, &mut a);
        assert_eq!(u, random_unit_vector(4, &mut b));
    }

    #[test]
    fn picked_directions_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 1..20 {
            let u = pick_direction(&[1.0, -2.0, 0.5], k, Phase::Fitness, &mut rng);
            let n: f64 = u.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn box_steps_flip_at_upper_bound() {
        let b = vec![Interval::new(0.0, 10.0); 2];
        assert_eq!(box_steps(&[10.0, 5.0], &b, 1e-3), vec![-0.01, 0.01]);
    }

    #[test]
    fn config_validation() {
        assert!(ProbeConfig::new(200, 1e-6, 0.1).is_ok());
        assert!(ProbeConfig::new(0, 1e-6, 0.1).is_err());
        assert!(ProbeConfig::new(1, 0.0, 0.1).is_err());
        assert!(ProbeConfig::new(1, 1e-6, 1.5).is_err());
    }

    fn slope_problem() -> Problem {
        // violation 1 - x0 while x0 < 1, feasible beyond
        Problem::builder(vec![Interval::new(-5.0, 5.0); 2], |x| x[1])
            .inequality(|x| 1.0 - x[0])
            .build()
            .unwrap()
    }

    #[test]
    fn feasibility_probe_descends_violation() {
        let p = slope_problem();
        let ev = Evaluator::new(&p);
        let cfg = ProbeConfig::new(50, 1e-6, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let c = probe_candidate(&[0.0, 0.0], &ev, Phase::Feasibility, &[1.0, 1.0], &cfg, &mut rng).unwrap();
            assert!(c[0] >= 0.0, "{c:?}");
        }
        assert_eq!(ev.calls(), 20 * 3);
    }

    #[test]
    fn probe_move_costs_and_zero_probability() {
        let p = slope_problem();
        let acc = Acceptance::Objective(Objective::Violation);
        let start = Fish::new(vec![0.0, 0.0], p.evaluate(&[0.0, 0.0]).unwrap(), 1.0);

        let ev = Evaluator::new(&p);
        let cfg = ProbeConfig::new(10, 1e-6, 1.0).unwrap();
        let mut f = start.clone();
        let out = probe_move(
            &mut f, &ev, Phase::Feasibility, &[1.0, 1.0], &cfg, &acc, 0.0,
            &mut ChaCha8Rng::seed_from_u64(1), &mut ChaCha8Rng::seed_from_u64(2),
        )
        .unwrap();
        assert!(out.probed);
        assert_eq!(ev.calls(), 2 + 1 + 1);

        let ev = Evaluator::new(&p);
        let cfg = ProbeConfig::new(10, 1e-6, 0.0).unwrap();
        let mut f = start.clone();
        let out = probe_move(
            &mut f, &ev, Phase::Feasibility, &[1.0, 1.0], &cfg, &acc, 0.3,
            &mut ChaCha8Rng::seed_from_u64(1), &mut ChaCha8Rng::seed_from_u64(2),
        )
        .unwrap();
        assert!(!out.probed);
        let ev2 = Evaluator::new(&p);
        let mut g = start.clone();
        let plain = individual_movement(&mut g, &ev2, &[1.0, 1.0], &acc, 0.3, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(out.movement, plain);
        assert_eq!(f, g);
        assert_eq!(ev.calls(), 1);
    }
}
