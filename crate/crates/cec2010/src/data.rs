//! Shift and rotation data files.
//!
//! A data directory holds one `<ID>.txt` per problem. The first row is the
//! shift vector; problems with a rotation follow it with `D` rows of the
//! matrix. Rows may hold more than `D` numbers, in which case only the first
//! `D` are used. An optional `manifest.json` maps file names to SHA-256
//! digests and is checked on every load.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{BenchError, BenchId};

pub const DATA_DIR_ENV: &str = "CEC2010_DATA_DIR";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftData {
    pub shift: Vec<f64>,
    /// Row-major `D x D`, present only for rotated problems.
    pub rotation: Option<Vec<f64>>,
}

impl ShiftData {
    pub fn zero(id: BenchId, dimension: usize) -> Self {
        Self {
            shift: vec![0.0; dimension],
            rotation: id.is_rotated().then(|| identity(dimension)),
        }
    }
}

pub fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    m
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn data_file(dir: &Path, id: BenchId) -> PathBuf {
    dir.join(format!("{id}.txt"))
}

fn read_manifest(dir: &Path) -> Result<Option<Manifest>, BenchError> {
    let path = dir.join(MANIFEST_FILE);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(|source| BenchError::Io { path: path.clone(), source })?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| BenchError::Parse {
            path,
            line: e.line(),
            reason: e.to_string(),
        })
}

/// Writes `manifest.json` covering every `C??.txt` file in `dir`.
pub fn write_manifest(dir: &Path) -> Result<Manifest, BenchError> {
    let mut manifest = Manifest::default();
    for id in BenchId::ALL {
        let path = data_file(dir, id);
        if path.exists() {
            let bytes = fs::read(&path).map_err(|source| BenchError::Io { path: path.clone(), source })?;
            manifest.files.insert(format!("{id}.txt"), sha256_hex(&bytes));
        }
    }
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text).map_err(|source| BenchError::Io { path, source })?;
    Ok(manifest)
}

pub fn read_shift_data(dir: &Path, id: BenchId, dimension: usize) -> Result<ShiftData, BenchError> {
    let path = data_file(dir, id);
    let bytes = fs::read(&path).map_err(|source| BenchError::Io { path: path.clone(), source })?;
    if let Some(manifest) = read_manifest(dir)? {
        let name = format!("{id}.txt");
        if let Some(expected) = manifest.files.get(&name) {
            let actual = sha256_hex(&bytes);
            if !expected.eq_ignore_ascii_case(&actual) {
                return Err(BenchError::Checksum {
                    path,
                    expected: expected.clone(),
                    actual,
                });
            }
        }
    }
    let text = String::from_utf8(bytes).map_err(|e| BenchError::Parse {
        path: path.clone(),
        line: 0,
        reason: e.to_string(),
    })?;
    parse_shift_data(&text, id, dimension).map_err(|(line, reason)| BenchError::Parse { path, line, reason })
}

fn parse_shift_data(text: &str, id: BenchId, d: usize) -> Result<ShiftData, (usize, String)> {
    let mut rows = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_row(l, d).map_err(|r| (i + 1, r)));
    let shift = rows.next().ok_or((0, "file is empty".to_string()))??;
    let rotation = if id.is_rotated() {
        let mut m = Vec::with_capacity(d * d);
        for k in 0..d {
            let row = rows
                .next()
                .ok_or((0, format!("expected {d} rotation rows, found {k}")))??;
            m.extend(row);
        }
        Some(m)
    } else {
        None
    };
    Ok(ShiftData { shift, rotation })
}

fn parse_row(line: &str, d: usize) -> Result<Vec<f64>, String> {
    let values = line
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .take(d)
        .map(|s| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() < d {
        return Err(format!("expected at least {d} values, found {}", values.len()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(format!("non-finite value {v}"));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_long_rows_and_rotation() {
        let text = "1 2 3 4\n\n1,0,0\n0 1 0\n0 0 1 9\n";
        let data = parse_shift_data(text, BenchId::C06, 3).unwrap();
        assert_eq!(data.shift, vec![1.0, 2.0, 3.0]);
        assert_eq!(data.rotation.unwrap(), identity(3));
    }

    #[test]
    fn short_row_is_rejected_with_line() {
        let err = parse_shift_data("1 2 3\n1 0 0\n0 1\n", BenchId::C08, 3).unwrap_err();
        assert_eq!(err.0, 3);
    }

    #[test]
    fn missing_rows_are_rejected() {
        assert!(parse_shift_data("1 2 3\n", BenchId::C08, 3).is_err());
        assert!(parse_shift_data("", BenchId::C01, 3).is_err());
        assert!(parse_shift_data("1 2 x\n", BenchId::C01, 3).is_err());
    }
}
