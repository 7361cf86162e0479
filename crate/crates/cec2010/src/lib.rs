//! The seven CEC 2010 constrained problems used in the wrFSS experiments,
//! instantiated at `D = 10` with equalities relaxed by `1e-4`.
//!
//! Official shift data is read from a data directory (see [`data`]). When
//! none is available, [`load_fallback`] builds the same problems with a zero
//! shift and identity rotation. Results from those instances are not
//! comparable with published numbers.

pub mod data;
pub mod functions;
pub mod reference;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use wrfss::rng::{substream, Purpose};
use wrfss::{Interval, Problem, ProblemError};

pub use data::{ShiftData, DATA_DIR_ENV};
pub use reference::{known_reference_values, Reference, ReferenceRow};

pub const DIMENSION: usize = 10;
pub const EQUALITY_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BenchId {
    C01,
    C03,
    C04,
    C06,
    C07,
    C08,
    C09,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub lower: f64,
    pub upper: f64,
    pub equalities: usize,
    pub inequalities: usize,
    /// Published feasible-region ratio at 10D.
    pub feasible_ratio: f64,
}

impl BenchId {
    pub const ALL: [BenchId; 7] = [
        BenchId::C01,
        BenchId::C03,
        BenchId::C04,
        BenchId::C06,
        BenchId::C07,
        BenchId::C08,
        BenchId::C09,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchId::C01 => "C01",
            BenchId::C03 => "C03",
            BenchId::C04 => "C04",
            BenchId::C06 => "C06",
            BenchId::C07 => "C07",
            BenchId::C08 => "C08",
            BenchId::C09 => "C09",
        }
    }

    pub fn metadata(self) -> Metadata {
        let (lower, upper, equalities, inequalities, feasible_ratio) = match self {
            BenchId::C01 => (0.0, 10.0, 0, 2, 0.997689),
            BenchId::C03 => (-1000.0, 1000.0, 1, 0, 0.0),
            BenchId::C04 => (-50.0, 50.0, 4, 0, 0.0),
            BenchId::C06 => (-600.0, 600.0, 2, 0, 0.0),
            BenchId::C07 => (-140.0, 140.0, 0, 1, 0.505123),
            BenchId::C08 => (-140.0, 140.0, 0, 1, 0.379512),
            BenchId::C09 => (-500.0, 500.0, 1, 0, 0.0),
        };
        Metadata {
            lower,
            upper,
            equalities,
            inequalities,
            feasible_ratio,
        }
    }

    pub fn is_rotated(self) -> bool {
        matches!(self, BenchId::C06 | BenchId::C08)
    }
}

impl fmt::Display for BenchId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for BenchId {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BenchId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| BenchError::UnknownId(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown problem id `{0}` (expected one of C01, C03, C04, C06, C07, C08, C09)")]
    UnknownId(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Parse { path: PathBuf, line: usize, reason: String },
    #[error("{path}: checksum mismatch (manifest {expected}, file {actual})")]
    Checksum {
        path: PathBuf,
        expected: String,
        actual: String,
    },
    #[error("{id} does not match its metadata: {reason}")]
    Metadata { id: BenchId, reason: String },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Where a problem's shift data came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "path")]
pub enum DataSource {
    Official(PathBuf),
    /// Zero shift, identity rotation. Not the official instance.
    ZeroShift,
}

impl DataSource {
    pub fn is_conformant(&self) -> bool {
        matches!(self, DataSource::Official(_))
    }
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSource::Official(p) => write!(f, "official data from {}", p.display()),
            DataSource::ZeroShift => f.write_str("zero-shift fallback (non-conformant)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchProblem {
    pub id: BenchId,
    pub problem: Problem,
    pub source: DataSource,
}

impl BenchProblem {
    pub fn metadata(&self) -> Metadata {
        self.id.metadata()
    }
}

/// Loads `id` with data from `data_dir`.
pub fn load_problem(id: BenchId, data_dir: &Path) -> Result<BenchProblem, BenchError> {
    let data = data::read_shift_data(data_dir, id, DIMENSION)?;
    build(id, data, DataSource::Official(data::data_file(data_dir, id)))
}

/// Loads `id` with a zero shift and identity rotation.
pub fn load_fallback(id: BenchId) -> BenchProblem {
    build(id, ShiftData::zero(id, DIMENSION), DataSource::ZeroShift).expect("fallback instances are valid")
}

/// Uses the directory named by `CEC2010_DATA_DIR` if set, the fallback otherwise.
pub fn load_from_env(id: BenchId) -> Result<BenchProblem, BenchError> {
    match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) if !dir.is_empty() => load_problem(id, Path::new(&dir)),
        _ => Ok(load_fallback(id)),
    }
}

pub fn build(id: BenchId, data: ShiftData, source: DataSource) -> Result<BenchProblem, BenchError> {
    use functions::*;

    let meta = id.metadata();
    let d = data.shift.len();
    let bounds = vec![Interval::new(meta.lower, meta.upper); d];
    let shift = Arc::new(data.shift);
    let rotation = Arc::new(data.rotation.unwrap_or_else(|| data::identity(d)));
    if rotation.len() != d * d {
        return Err(BenchError::Metadata {
            id,
            reason: format!("rotation has {} entries, expected {}", rotation.len(), d * d),
        });
    }
    let z = {
        let shift = Arc::clone(&shift);
        move |x: &[f64]| shifted(x, &shift)
    };
    // Rosenbrock problems shift by `o - 1` so the optimum sits at the shift.
    let z1 = {
        let shift = Arc::clone(&shift);
        move |x: &[f64]| x.iter().zip(shift.iter()).map(|(a, o)| a + 1.0 - o).collect::<Vec<_>>()
    };

    let builder = match id {
        BenchId::C01 => {
            let (a, b, c) = (z.clone(), z.clone(), z);
            Problem::builder(bounds, move |x| c01_objective(&a(x)))
                .inequality(move |x| c01_product(&b(x)))
                .inequality(move |x| c01_sum(&c(x)))
        }
        BenchId::C03 => {
            let (a, b) = (z.clone(), z);
            Problem::builder(bounds, move |x| rosenbrock(&a(x))).equality(move |x| c03_equality(&b(x)))
        }
        BenchId::C04 => {
            let mut builder = {
                let a = z.clone();
                Problem::builder(bounds, move |x| max_component(&a(x)))
            };
            for k in 0..4 {
                let a = z.clone();
                builder = builder.equality(move |x| c04_equalities(&a(x))[k]);
            }
            builder
        }
        BenchId::C06 => {
            let a = z.clone();
            let mut builder = Problem::builder(bounds, move |x| max_component(&a(x)));
            for k in 0..2 {
                let (a, m) = (z.clone(), Arc::clone(&rotation));
                builder = builder.equality(move |x| c06_equalities(&c06_transform(&a(x), &m))[k]);
            }
            builder
        }
        BenchId::C07 => Problem::builder(bounds, move |x| rosenbrock(&z1(x))).inequality(move |x| c07_inequality(&z(x))),
        BenchId::C08 => {
            let m = Arc::clone(&rotation);
            Problem::builder(bounds, move |x| rosenbrock(&z1(x))).inequality(move |x| c07_inequality(&rotate(&z(x), &m)))
        }
        BenchId::C09 => Problem::builder(bounds, move |x| rosenbrock(&z1(x))).equality(move |x| c09_equality(&z(x))),
    };
    let problem = builder.delta(EQUALITY_TOLERANCE).build()?;
    check_metadata(id, &problem)?;
    Ok(BenchProblem { id, problem, source })
}

fn check_metadata(id: BenchId, problem: &Problem) -> Result<(), BenchError> {
    let meta = id.metadata();
    let fail = |reason: String| Err(BenchError::Metadata { id, reason });
    if problem.dimension() != DIMENSION {
        return fail(format!("dimension {} instead of {DIMENSION}", problem.dimension()));
    }
    if problem.equality_count() != meta.equalities || problem.inequality_count() != meta.inequalities {
        return fail(format!(
            "E={} I={} instead of E={} I={}",
            problem.equality_count(),
            problem.inequality_count(),
            meta.equalities,
            meta.inequalities
        ));
    }
    if problem.bounds().iter().any(|b| b.lower != meta.lower || b.upper != meta.upper) {
        return fail(format!("bounds differ from [{}, {}]", meta.lower, meta.upper));
    }
    Ok(())
}

const SAMPLE_CHUNK: u64 = 4096;

/// Fraction of uniform samples in the box with zero violation.
///
/// Samples are drawn in fixed-size chunks, each from its own stream, so the
/// estimate depends only on `seed` and `samples`. Returns 0 for `samples == 0`.
pub fn feasible_ratio(problem: &Problem, samples: u64, seed: u64) -> f64 {
    if samples == 0 {
        return 0.0;
    }
    let bounds = problem.bounds();
    let mut x = vec![0.0; bounds.len()];
    let mut feasible = 0u64;
    let chunks = samples.div_ceil(SAMPLE_CHUNK);
    for chunk in 0..chunks {
        let mut rng = substream(seed, Purpose::Sampling, chunk, 0);
        let count = SAMPLE_CHUNK.min(samples - chunk * SAMPLE_CHUNK);
        for _ in 0..count {
            for (v, b) in x.iter_mut().zip(bounds) {
                *v = b.lower + rng.random::<f64>() * b.width();
            }
            if problem.violation(&x).is_ok_and(|phi| phi == 0.0) {
                feasible += 1;
            }
        }
    }
    feasible as f64 / samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fallback_metadata_matches() {
        for id in BenchId::ALL {
            let p = load_fallback(id);
            let m = id.metadata();
            assert_eq!(p.problem.equality_count(), m.equalities);
            assert_eq!(p.problem.inequality_count(), m.inequalities);
            assert_eq!(p.problem.delta(), 1e-4);
            assert!(!p.source.is_conformant());
        }
    }

    #[test]
    fn c01_shape() {
        let p = load_fallback(BenchId::C01).problem;
        assert_eq!(p.dimension(), 10);
        assert_eq!(p.constraint_count(), 2);
        assert_eq!(p.bounds()[0], Interval::new(0.0, 10.0));
    }

    #[test]
    fn unknown_id() {
        assert!(matches!("C05".parse::<BenchId>(), Err(BenchError::UnknownId(_))));
        assert_eq!("c07".parse::<BenchId>().unwrap(), BenchId::C07);
    }

    #[test]
    fn rosenbrock_optimum_at_shift() {
        for id in [BenchId::C03, BenchId::C07, BenchId::C09] {
            let p = load_fallback(id).problem;
            let e = p.evaluate(&[0.0; 10]).unwrap();
            assert_eq!(e.fitness, if id == BenchId::C03 { 9.0 } else { 0.0 }, "{id}");
        }
    }

    #[test]
    fn unconstrained_box_is_fully_feasible() {
        let p = Problem::builder(vec![Interval::new(-1.0, 1.0); 3], |x| x[0]).build().unwrap();
        assert_eq!(feasible_ratio(&p, 1000, 3), 1.0);
        assert_eq!(feasible_ratio(&p, 0, 3), 0.0);
    }

    #[test]
    fn ratio_is_deterministic() {
        let p = load_fallback(BenchId::C07).problem;
        assert_eq!(feasible_ratio(&p, 10_000, 9), feasible_ratio(&p, 10_000, 9));
    }
}
