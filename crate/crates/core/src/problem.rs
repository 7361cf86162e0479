//! Constrained nonlinear programming problems and the violation measure.
//!
//! A [`Problem`] minimizes an objective over a box subject to inequality
//! constraints `g(x) <= 0` and equality constraints `h(x) = 0`. Equalities are
//! always judged through the tolerance `delta`, i.e. as `|h(x)| - delta <= 0`,
//! both in the violation measure and in the feasibility flag.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Real-valued function of a point in the search box.
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Which function produced a bad value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FnSource {
    Objective,
    /// Constraint index in `0..m`, inequalities first.
    Constraint(usize),
}

impl fmt::Display for FnSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnSource::Objective => write!(f, "objective"),
            FnSource::Constraint(j) => write!(f, "constraint {j}"),
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ProblemError {
    #[error("problem must have at least one dimension")]
    NoDimensions,
    #[error("bound interval {index} is empty or not finite: [{lower}, {upper}]")]
    EmptyInterval { index: usize, lower: f64, upper: f64 },
    #[error("equality tolerance delta must be positive, got {0}")]
    NonPositiveDelta(f64),
    #[error("violation exponent must be positive, got {0}")]
    NonPositiveExponent(f64),
    #[error("point has {got} coordinates, problem dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{source_fn} returned non-finite value {value}")]
    NonFinite { source_fn: FnSource, value: f64 },
}

/// Closed interval `[lower, upper]` with `lower < upper`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }

    fn is_valid(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper
    }
}

/// Fitness and constraint violation of one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub fitness: f64,
    pub violation: f64,
    pub feasible: bool,
}

impl Evaluation {
    pub fn new(fitness: f64, violation: f64) -> Self {
        Self {
            fitness,
            violation,
            feasible: violation == 0.0,
        }
    }
}

#[derive(Clone)]
pub struct Problem {
    bounds: Vec<Interval>,
    objective: ScalarFn,
    inequalities: Vec<ScalarFn>,
    equalities: Vec<ScalarFn>,
    delta: f64,
    exponent: f64,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("dimension", &self.dimension())
            .field("inequalities", &self.inequalities.len())
            .field("equalities", &self.equalities.len())
            .field("delta", &self.delta)
            .field("exponent", &self.exponent)
            .finish()
    }
}

pub struct ProblemBuilder {
    bounds: Vec<Interval>,
    objective: ScalarFn,
    inequalities: Vec<ScalarFn>,
    equalities: Vec<ScalarFn>,
    delta: f64,
    exponent: f64,
}

impl ProblemBuilder {
    pub fn inequality(mut self, g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.inequalities.push(Arc::new(g));
        self
    }

    pub fn equality(mut self, h: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.equalities.push(Arc::new(h));
        self
    }

    pub fn delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// Exponent `p` applied to every violation term. Defaults to 1.
    pub fn exponent(mut self, p: f64) -> Self {
        self.exponent = p;
        self
    }

    pub fn build(self) -> Result<Problem, ProblemError> {
        if self.bounds.is_empty() {
            return Err(ProblemError::NoDimensions);
        }
        for (index, b) in self.bounds.iter().enumerate() {
            if !b.is_valid() {
                return Err(ProblemError::EmptyInterval {
                    index,
                    lower: b.lower,
                    upper: b.upper,
                });
            }
        }
        // NaN fails both comparisons below
        if !self.equalities.is_empty() && !(self.delta > 0.0) {
            return Err(ProblemError::NonPositiveDelta(self.delta));
        }
        if !(self.delta >= 0.0) {
            return Err(ProblemError::NonPositiveDelta(self.delta));
        }
        if !(self.exponent > 0.0) {
            return Err(ProblemError::NonPositiveExponent(self.exponent));
        }
        Ok(Problem {
            bounds: self.bounds,
            objective: self.objective,
            inequalities: self.inequalities,
            equalities: self.equalities,
            delta: self.delta,
            exponent: self.exponent,
        })
    }
}

impl Problem {
    pub fn builder(
        bounds: Vec<Interval>,
        objective: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> ProblemBuilder {
        ProblemBuilder {
            bounds,
            objective: Arc::new(objective),
            inequalities: Vec::new(),
            equalities: Vec::new(),
            delta: 0.0,
            exponent: 1.0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    /// Number of inequality constraints (`q`).
    pub fn inequality_count(&self) -> usize {
        self.inequalities.len()
    }

    pub fn equality_count(&self) -> usize {
        self.equalities.len()
    }

    /// Total number of constraints (`m`).
    pub fn constraint_count(&self) -> usize {
        self.inequalities.len() + self.equalities.len()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Evaluation, ProblemError> {
        self.check_dimension(x)?;
        let fitness = (self.objective)(x);
        if !fitness.is_finite() {
            return Err(ProblemError::NonFinite {
                source_fn: FnSource::Objective,
                value: fitness,
            });
        }
        Ok(Evaluation::new(fitness, self.violation_unchecked(x)?))
    }

    /// Violation measure alone, without touching the objective.
    pub fn violation(&self, x: &[f64]) -> Result<f64, ProblemError> {
        self.check_dimension(x)?;
        self.violation_unchecked(x)
    }

    fn violation_unchecked(&self, x: &[f64]) -> Result<f64, ProblemError> {
        let mut total = 0.0;
        for (j, g) in self.inequalities.iter().enumerate() {
            let v = finite(g(x), j)?;
            total += self.term(v);
        }
        let q = self.inequalities.len();
        for (j, h) in self.equalities.iter().enumerate() {
            let v = finite(h(x), q + j)?;
            total += self.term(v.abs() - self.delta);
        }
        Ok(total)
    }

    fn term(&self, amount: f64) -> f64 {
        let excess = amount.max(0.0);
        if excess == 0.0 {
            0.0
        } else if self.exponent == 1.0 {
            excess
        } else {
            excess.powf(self.exponent)
        }
    }

    fn check_dimension(&self, x: &[f64]) -> Result<(), ProblemError> {
        if x.len() != self.bounds.len() {
            return Err(ProblemError::DimensionMismatch {
                expected: self.bounds.len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Replaces every equality `h` by the inequality `|h| - delta <= 0`.
    pub fn relax_equalities(&self, delta: f64) -> Result<Problem, ProblemError> {
        if !(delta > 0.0) {
            return Err(ProblemError::NonPositiveDelta(delta));
        }
        let mut inequalities = self.inequalities.clone();
        for h in &self.equalities {
            let h = Arc::clone(h);
            inequalities.push(Arc::new(move |x: &[f64]| h(x).abs() - delta));
        }
        Ok(Problem {
            bounds: self.bounds.clone(),
            objective: Arc::clone(&self.objective),
            inequalities,
            equalities: Vec::new(),
            delta,
            exponent: self.exponent,
        })
    }

    /// Same problem with a different equality tolerance.
    pub fn with_delta(&self, delta: f64) -> Result<Problem, ProblemError> {
        if !(delta > 0.0) && !self.equalities.is_empty() || !(delta >= 0.0) {
            return Err(ProblemError::NonPositiveDelta(delta));
        }
        Ok(Problem { delta, ..self.clone() })
    }

    /// Same problem with a different violation exponent.
    pub fn with_exponent(&self, p: f64) -> Result<Problem, ProblemError> {
        if !(p > 0.0) {
            return Err(ProblemError::NonPositiveExponent(p));
        }
        Ok(Problem { exponent: p, ..self.clone() })
    }

    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        self.clamp_in_place(&mut out);
        out
    }

    pub fn clamp_in_place(&self, x: &mut [f64]) {
        for (v, b) in x.iter_mut().zip(&self.bounds) {
            *v = b.clamp(*v);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.bounds.len() && x.iter().zip(&self.bounds).all(|(v, b)| b.contains(*v))
    }
}

fn finite(v: f64, j: usize) -> Result<f64, ProblemError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ProblemError::NonFinite {
            source_fn: FnSource::Constraint(j),
            value: v,
        })
    }
}

/// Evaluation front end that counts every call made through it.
///
/// Full evaluations and violation-only evaluations both count as one call.
pub struct Evaluator<'p> {
    problem: &'p Problem,
    calls: Cell<u64>,
}

impl<'p> Evaluator<'p> {
    pub fn new(problem: &'p Problem) -> Self {
        Self {
            problem,
            calls: Cell::new(0),
        }
    }

    pub fn problem(&self) -> &'p Problem {
        self.problem
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Evaluation, ProblemError> {
        self.calls.set(self.calls.get() + 1);
        self.problem.evaluate(x)
    }

    pub fn violation(&self, x: &[f64]) -> Result<f64, ProblemError> {
        self.calls.set(self.calls.get() + 1);
        self.problem.violation(x)
    }

    pub fn calls(&self) -> u64 {
        self.calls.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box(d: usize) -> Vec<Interval> {
        vec![Interval::new(-1.0, 1.0); d]
    }

    #[test]
    fn single_inequality_violation_is_its_value() {
        let p = Problem::builder(unit_box(1), |_| 0.0)
            .inequality(|_| 3.0)
            .build()
            .unwrap();
        let e = p.evaluate(&[0.0]).unwrap();
        assert_eq!(e.violation, 3.0);
        assert!(!e.feasible);
    }

    #[test]
    fn equality_violation_with_square_exponent() {
        let p = Problem::builder(unit_box(1), |_| 0.0)
            .equality(|_| 0.5)
            .delta(1e-4)
            .exponent(2.0)
            .build()
            .unwrap();
        let e = p.evaluate(&[0.0]).unwrap();
        assert!((e.violation - 0.24990001).abs() < 1e-15);
    }

    #[test]
    fn satisfied_constraints_are_feasible() {
        let p = Problem::builder(unit_box(2), |x| x[0] + x[1])
            .inequality(|x| x[0] - 0.5)
            .equality(|x| x[1] * 1e-6)
            .delta(1e-4)
            .build()
            .unwrap();
        let e = p.evaluate(&[0.2, 0.9]).unwrap();
        assert_eq!(e.violation, 0.0);
        assert!(e.feasible);
        assert!((e.fitness - 1.1).abs() < 1e-15);
    }

    #[test]
    fn relaxed_identity_equality_boundary() {
        let p = Problem::builder(unit_box(1), |_| 0.0)
            .equality(|x| x[0])
            .delta(1e-4)
            .build()
            .unwrap();
        let r = p.relax_equalities(1e-4).unwrap();
        assert_eq!(r.inequality_count(), 1);
        assert_eq!(r.constraint_count(), 1);
        assert_eq!(r.equality_count(), 0);
        assert!(r.evaluate(&[0.0]).unwrap().feasible);
        assert!(r.evaluate(&[1e-4]).unwrap().feasible);
        assert!(!r.evaluate(&[2e-4]).unwrap().feasible);
        // relaxation does not change the measure itself
        for x in [-0.5, -1e-4, 0.0, 3e-4, 0.7] {
            assert_eq!(
                p.evaluate(&[x]).unwrap().violation,
                r.evaluate(&[x]).unwrap().violation
            );
        }
    }

    #[test]
    fn relax_rejects_non_positive_delta() {
        let p = Problem::builder(unit_box(1), |_| 0.0).build().unwrap();
        assert_eq!(
            p.relax_equalities(0.0).unwrap_err(),
            ProblemError::NonPositiveDelta(0.0)
        );
        assert!(p.relax_equalities(-1.0).is_err());
    }

    #[test]
    fn builder_validates_invariants() {
        assert_eq!(
            Problem::builder(vec![], |_| 0.0).build().unwrap_err(),
            ProblemError::NoDimensions
        );
        assert!(matches!(
            Problem::builder(vec![Interval::new(1.0, 1.0)], |_| 0.0).build(),
            Err(ProblemError::EmptyInterval { index: 0, .. })
        ));
        assert!(matches!(
            Problem::builder(unit_box(1), |_| 0.0).equality(|_| 0.0).build(),
            Err(ProblemError::NonPositiveDelta(_))
        ));
        assert!(matches!(
            Problem::builder(unit_box(1), |_| 0.0).exponent(0.0).build(),
            Err(ProblemError::NonPositiveExponent(_))
        ));
    }

    #[test]
    fn non_finite_values_name_their_source() {
        let p = Problem::builder(unit_box(1), |_| 1.0)
            .inequality(|_| -1.0)
            .equality(|_| f64::NAN)
            .delta(1e-4)
            .build()
            .unwrap();
        match p.evaluate(&[0.0]) {
            Err(ProblemError::NonFinite { source_fn, .. }) => {
                assert_eq!(source_fn, FnSource::Constraint(1))
            }
            other => panic!("unexpected {other:?}"),
        }
        let p = Problem::builder(unit_box(1), |_| f64::INFINITY).build().unwrap();
        assert!(matches!(
            p.evaluate(&[0.0]),
            Err(ProblemError::NonFinite { source_fn: FnSource::Objective, .. })
        ));
    }

    #[test]
    fn clamp_projects_into_box() {
        let p = Problem::builder(vec![Interval::new(0.0, 10.0); 10], |_| 0.0)
            .build()
            .unwrap();
        let mut x = vec![5.0; 10];
        x[3] = 12.0;
        x[4] = 0.0;
        x[5] = -3.0;
        let c = p.clamp(&x);
        assert_eq!(c[3], 10.0);
        assert_eq!(c[4], 0.0);
        assert_eq!(c[5], 0.0);
        assert_eq!(c[0], 5.0);
        assert_eq!(p.clamp(&c), c);
        assert!(p.contains(&c));
    }

    #[test]
    fn evaluator_counts_calls() {
        let p = Problem::builder(unit_box(1), |x| x[0]).inequality(|x| x[0]).build().unwrap();
        let ev = Evaluator::new(&p);
        ev.evaluate(&[0.1]).unwrap();
        ev.violation(&[0.1]).unwrap();
        assert_eq!(ev.calls(), 2);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = Problem::builder(unit_box(2), |_| 0.0).build().unwrap();
        assert_eq!(
            p.evaluate(&[0.0]).unwrap_err(),
            ProblemError::DimensionMismatch { expected: 2, got: 1 }
        );
    }
}
