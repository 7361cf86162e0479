//! Published fitness statistics (mean and SD over 30 runs at 10D) for the
//! four wrFSS variants and three CEC 2010 top-ranked algorithms.

use serde::Serialize;

use crate::BenchId;

pub const ALGORITHMS: [&str; 7] = ["wrFSS", "wrFSSe", "wrFSSg", "wrFSSp", "εDEg", "Co-CLPSO", "E-ABC"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub algorithm: &'static str,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reference {
    pub id: BenchId,
    pub rows: Vec<ReferenceRow>,
}

impl Reference {
    pub fn get(&self, algorithm: &str) -> Option<&ReferenceRow> {
        self.rows.iter().find(|r| r.algorithm == algorithm)
    }
}

const TABLE: [(BenchId, [f64; 7], [f64; 7]); 7] = [
    (
        BenchId::C01,
        [-5.91e-01, -4.03e-01, -5.76e-01, -6.93e-01, -7.47e-01, -7.34e-01, -7.16e-01],
        [4.83e-02, 1.17e-01, 3.16e-02, 1.64e-02, 1.32e-03, 1.78e-02, 2.69e-02],
    ),
    (
        BenchId::C03,
        [6.33e+12, 4.01e+09, 5.20e+13, 7.71e+12, 0.00e+00, 3.55e-01, 2.45e+12],
        [5.54e+12, 8.37e+09, 1.46e+14, 1.45e+13, 0.00e+00, 1.78e+00, 1.01e+12],
    ),
    (
        BenchId::C04,
        [2.23e+00, 5.60e+00, 1.88e+00, 1.55e+00, -9.92e-06, -9.34e-06, 8.56e-01],
        [5.37e+00, 7.16e+00, 4.64e+00, 4.24e+00, 1.55e-07, 1.07e-06, 3.01e+00],
    ),
    (
        BenchId::C06,
        [2.92e+02, -5.65e+02, -5.20e+00, 3.04e+02, -5.79e+02, -5.79e+02, 4.38e+02],
        [9.40e+01, 3.55e+00, 1.51e+02, 8.60e+01, 3.63e-03, 5.73e-04, 8.60e+01],
    ),
    (
        BenchId::C07,
        [5.09e+05, 5.01e+00, 5.88e+09, 4.32e+05, 0.00e+00, 7.97e-01, 7.16e+01],
        [3.17e+05, 6.63e+00, 4.23e+09, 2.40e+05, 0.00e+00, 1.63e+00, 5.19e+01],
    ),
    (
        BenchId::C08,
        [4.16e+09, 6.04e+01, 7.34e+09, 4.19e+09, 6.73e+00, 6.09e-01, 4.11e+02],
        [2.13e+09, 1.60e+01, 3.76e+09, 2.25e+09, 5.56e+00, 1.43e+00, 9.36e+02],
    ),
    (
        BenchId::C09,
        [4.57e+12, 3.61e+06, 9.52e+12, 4.39e+12, 0.00e+00, 1.99e+10, 2.02e+12],
        [2.06e+12, 1.40e+07, 4.89e+12, 1.79e+12, 0.00e+00, 9.97e+10, 1.81e+12],
    ),
];

pub fn known_reference_values(id: BenchId) -> Reference {
    let (_, means, sds) = TABLE.iter().find(|(t, _, _)| *t == id).expect("every id has a row");
    Reference {
        id,
        rows: ALGORITHMS
            .iter()
            .zip(means.iter().zip(sds))
            .map(|(&algorithm, (&mean, &sd))| ReferenceRow { algorithm, mean, sd })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_examples() {
        let c01 = known_reference_values(BenchId::C01);
        assert_eq!(c01.get("εDEg").unwrap().mean, -7.47e-01);
        assert_eq!(c01.get("εDEg").unwrap().sd, 1.32e-03);
        assert_eq!(known_reference_values(BenchId::C06).get("wrFSSe").unwrap().mean, -5.65e+02);
        assert_eq!(known_reference_values(BenchId::C08).get("Co-CLPSO").unwrap().mean, 6.09e-01);
    }

    #[test]
    fn every_problem_has_all_algorithms() {
        for id in BenchId::ALL {
            assert_eq!(known_reference_values(id).rows.len(), ALGORITHMS.len());
        }
    }
}
