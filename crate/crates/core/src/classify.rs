//! Class membership tests at a finite depth through the zeros of the Jensen
//! and Appell polynomials.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jensen::{appell, jensen, JensenError};
use crate::poly::{Complex, Polynomial};
use crate::regions::{count_in, Region, DEFAULT_AMBIGUITY_BAND};
use crate::rootfind::{find_roots_default, RootError, RootSet};
use crate::series::PowerSeries;

/// Relative size of imaginary parts tolerated in a "real" series.
pub const REAL_COEFF_TOL: f64 = 1e-12;

/// Minimum run of equal trailing counts reported as stabilization.
pub const DEFAULT_PLATEAU_LEN: usize = 5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("series has non-real coefficients")]
    NonRealCoefficients,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Jensen(#[from] JensenError),
    #[error("root finding failed at n = {n}: {source}")]
    Roots { n: usize, source: RootError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassId {
    PO,
    LP,
    LPstar,
    LPS0star,
}

impl ClassId {
    pub fn needs_real(self) -> bool {
        self != ClassId::PO
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassId::PO => "PO",
            ClassId::LP => "LP",
            ClassId::LPstar => "LPstar",
            ClassId::LPS0star => "LPS0star",
        })
    }
}

impl FromStr for ClassId {
    type Err = ClassifyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "po" => Ok(ClassId::PO),
            "lp" => Ok(ClassId::LP),
            "lp*" | "lpstar" => Ok(ClassId::LPstar),
            "lps0*" | "lps0star" => Ok(ClassId::LPS0star),
            _ => Err(ClassifyError::InvalidArgument(format!("unknown class '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// No violation up to the tested depth; never a proof of membership.
    Consistent,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub n: usize,
    /// A zero outside the admissible region, when one witnesses the failure.
    pub zero: Option<[f64; 2]>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassVerdict {
    pub class_id: ClassId,
    pub n_max: usize,
    pub verdict: Verdict,
    /// `N_0..N_{n_max}`: zeros outside the admissible region.
    pub counts: Vec<usize>,
    pub stabilized_at: Option<usize>,
    pub stabilized_value: Option<usize>,
    pub violations: Vec<Violation>,
    /// Indices whose zeros sit inside the ambiguity band; monotonicity
    /// failures touching them are not counted as violations.
    pub excluded: Vec<usize>,
    pub tol: f64,
    pub plateau_len: usize,
}

/// One entry of a zero-count sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroCount {
    pub n: usize,
    pub count: usize,
    /// Some zero is classified differently at `tol` and at the ambiguity band.
    pub ambiguous: bool,
}

fn is_real_region(region: &Region) -> bool {
    matches!(region, Region::Complement(inner) if matches!(**inner, Region::RealLine | Region::NonNegativeRay))
}

fn check_real(f: &PowerSeries) -> Result<(), ClassifyError> {
    if f.is_real(REAL_COEFF_TOL) {
        Ok(())
    } else {
        Err(ClassifyError::NonRealCoefficients)
    }
}

fn roots_of(p: &Polynomial, n: usize) -> Result<Option<RootSet>, ClassifyError> {
    match p.degree() {
        None | Some(0) => Ok(None),
        _ => find_roots_default(p)
            .map(Some)
            .map_err(|source| ClassifyError::Roots { n, source }),
    }
}

#[cfg(feature = "parallel")]
fn per_index<T, F>(n_max: usize, f: F) -> Result<Vec<T>, ClassifyError>
where
    T: Send,
    F: Fn(usize) -> Result<T, ClassifyError> + Sync + Send,
{
    use rayon::prelude::*;
    (0..=n_max).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn per_index<T, F>(n_max: usize, f: F) -> Result<Vec<T>, ClassifyError>
where
    F: Fn(usize) -> Result<T, ClassifyError>,
{
    (0..=n_max).map(f).collect()
}

fn appell_count(f: &PowerSeries, n: usize, region: &Region, tol: f64) -> Result<ZeroCount, ClassifyError> {
    let a = appell(f, n)?;
    let (count, ambiguous) = match roots_of(&a, n)? {
        None => (0, false),
        Some(rs) => (
            count_in(&rs, region, tol),
            rs.roots
                .iter()
                .any(|r| region.is_ambiguous(r.z, tol, DEFAULT_AMBIGUITY_BAND)),
        ),
    };
    Ok(ZeroCount { n, count, ambiguous })
}

/// `N(A(f,n); X)` for `n = 0..=n_max`, with ambiguity flags.
pub fn jensen_zero_counts_detailed(
    f: &PowerSeries,
    n_max: usize,
    region: &Region,
    tol: f64,
) -> Result<Vec<ZeroCount>, ClassifyError> {
    if is_real_region(region) {
        check_real(f)?;
    }
    per_index(n_max, |n| appell_count(f, n, region, tol))
}

/// `N_n = N(A(f,n); X)` for `n = 0..=n_max`; `A(f,n) = 0` gives `N_n = 0`.
pub fn jensen_zero_counts(
    f: &PowerSeries,
    n_max: usize,
    region: &Region,
    tol: f64,
) -> Result<Vec<usize>, ClassifyError> {
    Ok(jensen_zero_counts_detailed(f, n_max, region, tol)?
        .into_iter()
        .map(|c| c.count)
        .collect())
}

/// Start of a trailing run of equal values at least `plateau_len` long.
pub fn find_plateau(counts: &[usize], plateau_len: usize) -> Option<(usize, usize)> {
    let last = *counts.last()?;
    let start = counts.iter().rposition(|&c| c != last).map_or(0, |i| i + 1);
    (counts.len() - start >= plateau_len.max(1)).then_some((start, last))
}

/// Tests the finite-depth criterion of `class_id` for `n <= n_max`.
///
/// * `PO`: every zero of `J(f,n)` lies in the closed upper half plane.
/// * `LP`: real coefficients and every zero of `J(f,n)` real.
/// * `LPstar`: `N_n = N(A(f,n); C \ R)` satisfies `0 = N_0 = N_1 <= N_2 <= ...`.
/// * `LPS0star`: `N_n = N(A(f,n); C \ [0, inf))` satisfies `0 = N_0 <= N_1 <= ...`.
pub fn check_membership(
    f: &PowerSeries,
    class_id: ClassId,
    n_max: usize,
    tol: f64,
) -> Result<ClassVerdict, ClassifyError> {
    check_membership_with(f, class_id, n_max, tol, DEFAULT_PLATEAU_LEN)
}

/// [`check_membership`] with an explicit stabilization plateau length.
pub fn check_membership_with(
    f: &PowerSeries,
    class_id: ClassId,
    n_max: usize,
    tol: f64,
    plateau_len: usize,
) -> Result<ClassVerdict, ClassifyError> {
    if n_max < 2 {
        return Err(ClassifyError::InvalidArgument(format!(
            "n_max must be >= 2, got {n_max}"
        )));
    }
    if class_id.needs_real() {
        check_real(f)?;
    }
    let mut violations = Vec::new();
    let mut excluded = Vec::new();
    let counts: Vec<usize>;
    let mut plateau = None;

    match class_id {
        ClassId::PO | ClassId::LP => {
            let region = if class_id == ClassId::PO {
                Region::UpperHalfPlane
            } else {
                Region::RealLine
            };
            let outside = region.clone().complement();
            let per_n = per_index(n_max, |n| {
                let j = jensen(f, n)?;
                let rs = roots_of(&j, n)?;
                let bad: Vec<Complex> = rs
                    .iter()
                    .flat_map(|rs| rs.roots.iter())
                    .filter(|r| outside.contains(r.z, tol))
                    .flat_map(|r| std::iter::repeat_n(r.z, r.multiplicity))
                    .collect();
                Ok(bad)
            })?;
            counts = per_n.iter().map(Vec::len).collect();
            for (n, bad) in per_n.iter().enumerate() {
                if let Some(z) = bad.first() {
                    violations.push(Violation {
                        n,
                        zero: Some([z.re, z.im]),
                        reason: format!("zero of J(f,{n}) outside {region}"),
                    });
                }
            }
        }
        ClassId::LPstar | ClassId::LPS0star => {
            let region = if class_id == ClassId::LPstar {
                Region::RealLine.complement()
            } else {
                Region::NonNegativeRay.complement()
            };
            let detailed = per_index(n_max, |n| appell_count(f, n, &region, tol))?;
            counts = detailed.iter().map(|c| c.count).collect();
            excluded = detailed.iter().filter(|c| c.ambiguous).map(|c| c.n).collect();
            let forced_zero = if class_id == ClassId::LPstar { 1 } else { 0 };
            for c in detailed.iter().take(forced_zero + 1) {
                if c.count != 0 && !c.ambiguous {
                    violations.push(Violation {
                        n: c.n,
                        zero: None,
                        reason: format!("N_{} = {} but must be 0", c.n, c.count),
                    });
                }
            }
            for w in detailed.windows(2) {
                if w[1].count < w[0].count && !w[0].ambiguous && !w[1].ambiguous && !appell(f, w[1].n)?.is_zero() {
                    violations.push(Violation {
                        n: w[1].n,
                        zero: None,
                        reason: format!("N_{} = {} < N_{} = {}", w[1].n, w[1].count, w[0].n, w[0].count),
                    });
                }
            }
            plateau = find_plateau(&counts, plateau_len);
        }
    }

    Ok(ClassVerdict {
        class_id,
        n_max,
        verdict: if violations.is_empty() {
            Verdict::Consistent
        } else {
            Verdict::Violated
        },
        counts,
        stabilized_at: plateau.map(|p| p.0),
        stabilized_value: plateau.map(|p| p.1),
        violations,
        excluded,
        tol,
        plateau_len,
    })
}

impl ClassVerdict {
    /// `n,N_n` rows.
    pub fn counts_csv(&self) -> String {
        let mut out = String::from("n,N_n\n");
        for (n, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{n},{c}\n"));
        }
        out
    }
}
