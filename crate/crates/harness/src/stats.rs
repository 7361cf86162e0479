use serde::{Deserialize, Serialize};
use wrfss::RunRecord;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // summation rounding must not push the mean outside [min, max]
        Some(Self {
            mean: mean.clamp(min, max),
            sd,
            min,
            max,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub completed: usize,
    pub failed: usize,
    pub feasible_runs: usize,
    pub fitness: Option<Moments>,
    pub violation: Option<Moments>,
}

impl SummaryStats {
    pub fn from_records(records: &[RunRecord], failed: usize) -> Self {
        let fitness: Vec<f64> = records.iter().map(|r| r.best.fitness).collect();
        let violation: Vec<f64> = records.iter().map(|r| r.best.violation).collect();
        Self {
            completed: records.len(),
            failed,
            feasible_runs: records.iter().filter(|r| r.best.feasible).count(),
            fitness: Moments::of(&fitness),
            violation: Moments::of(&violation),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_statistics() {
        let m = Moments::of(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((m.mean, m.min, m.max, m.sd), (2.0, 1.0, 3.0, 1.0));
    }

    #[test]
    fn single_sample() {
        let m = Moments::of(&[-0.5]).unwrap();
        assert_eq!((m.mean, m.min, m.max, m.sd), (-0.5, -0.5, -0.5, 0.0));
        assert!(Moments::of(&[]).is_none());
    }
}
