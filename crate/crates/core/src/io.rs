//! JSON file formats shared by the library and the CLI.
//!
//! Polynomials and series use `{"coeffs": [[re, im], ...]}` in ascending
//! order. Every entry must carry both components; `[re]` alone is rejected.

use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{Complex, PolyError, Polynomial};
use crate::series::PowerSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffFile {
    pub coeffs: Vec<[f64; 2]>,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    /// Carries serde_json's line/column annotation.
    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
}

impl TryFrom<CoeffFile> for Polynomial {
    type Error = PolyError;
    fn try_from(file: CoeffFile) -> Result<Self, PolyError> {
        Polynomial::new(to_complex(&file.coeffs))
    }
}

impl From<Polynomial> for CoeffFile {
    fn from(p: Polynomial) -> Self {
        CoeffFile {
            coeffs: from_complex(p.coeffs()),
        }
    }
}

impl TryFrom<CoeffFile> for PowerSeries {
    type Error = PolyError;
    fn try_from(file: CoeffFile) -> Result<Self, PolyError> {
        PowerSeries::new(to_complex(&file.coeffs))
    }
}

impl From<PowerSeries> for CoeffFile {
    fn from(s: PowerSeries) -> Self {
        CoeffFile {
            coeffs: from_complex(s.coeffs()),
        }
    }
}

fn to_complex(pairs: &[[f64; 2]]) -> Vec<Complex> {
    pairs.iter().map(|&[re, im]| Complex::new(re, im)).collect()
}

fn from_complex(cs: &[Complex]) -> Vec<[f64; 2]> {
    cs.iter().map(|c| [c.re, c.im]).collect()
}

/// Parses JSON text, keeping the position of any failure.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: shown.clone(),
        source,
    })?;
    parse_json(&text, &shown)
}

pub fn read_polynomial(path: &Path) -> Result<Polynomial, IoError> {
    read_json(path)
}

pub fn read_series(path: &Path) -> Result<PowerSeries, IoError> {
    read_json(path)
}
