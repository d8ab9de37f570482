//! Closed regions of the plane, zero counting inside them, and the even-power
//! placement search.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::poly::{Complex, Polynomial};
use crate::rootfind::{find_roots_default, RootError, RootSet};

/// Default boundary tolerance; membership inequalities are relaxed by
/// `tol * (1 + |z|)`.
pub const DEFAULT_REGION_TOL: f64 = 1e-9;

/// Width of the band outside a region inside which a computed point is
/// considered too close to call.
pub const DEFAULT_AMBIGUITY_BAND: f64 = 1e-6;

/// A closed subset of the complex plane (or the complement of one).
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// All of the plane.
    Plane,
    /// `Im z >= 0`.
    UpperHalfPlane,
    RealLine,
    /// `Re z >= 0`.
    ClosedRightHalfPlane,
    /// `|z| <= sqrt(1 + c^2) Re z`; `c = inf` is the closed right half plane.
    Sector(f64),
    /// `{z : z^p in Sector(c)}`.
    SectorRoot {
        c: f64,
        p: u32,
    },
    /// `|z| <= r`.
    Disk(f64),
    /// `[0, inf)`, the same set as `Sector(0)`.
    NonNegativeRay,
    Complement(Box<Region>),
}

impl Region {
    pub fn complement(self) -> Region {
        Region::Complement(Box::new(self))
    }

    /// Membership with every inequality relaxed by `tol * (1 + |z|)`.
    ///
    /// A complement negates the relaxed test, so boundary points always
    /// belong to the closed region and never to its complement.
    pub fn contains(&self, z: Complex, tol: f64) -> bool {
        let slack = tol * (1.0 + z.norm());
        match self {
            Region::Plane => true,
            Region::UpperHalfPlane => z.im >= -slack,
            Region::RealLine => z.im.abs() <= slack,
            Region::ClosedRightHalfPlane => z.re >= -slack,
            Region::Sector(c) => sector_contains(*c, z, slack),
            Region::SectorRoot { c, p } => {
                let w = z.powu(*p);
                sector_contains(*c, w, tol * (1.0 + w.norm()))
            }
            Region::Disk(r) => z.norm() <= r + slack,
            Region::NonNegativeRay => sector_contains(0.0, z, slack),
            Region::Complement(inner) => !inner.contains(z, tol),
        }
    }

    /// The point is classified differently at `tol` and at the looser `band`,
    /// i.e. it sits just outside the region.
    pub fn is_ambiguous(&self, z: Complex, tol: f64, band: f64) -> bool {
        self.contains(z, tol) != self.contains(z, band)
    }
}

// |z| <= sqrt(1+c^2) Re z is |Im z| <= c Re z with Re z >= 0; the second form
// keeps c = 0 consistent with the real-line test.
fn sector_contains(c: f64, z: Complex, slack: f64) -> bool {
    if z.re < -slack {
        return false;
    }
    if c.is_infinite() {
        return true;
    }
    z.im.abs() <= c * z.re.max(0.0) + slack
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("cannot parse region '{0}'")]
    Parse(String),
    #[error("no even power q <= {q_max} places every point in the closed right half plane")]
    NotFound { q_max: u32 },
    #[error("exponents up to {q_max} do not cover sample {index}: {points:?}")]
    CoverageIncomplete {
        q_max: u32,
        index: usize,
        points: Vec<[f64; 2]>,
    },
    #[error("q_max must be an even integer >= 2, got {0}")]
    BadExponentBound(u32),
}

/// Parses the CLI mini-language: `H`, `R`, `RHP`, `S:c`, `S:c^1/p`, `D:r`,
/// `ray`, `C` (whole plane), with a `!` prefix for complements. `c` may be
/// `inf`.
impl FromStr for Region {
    type Err = RegionError;

    fn from_str(s: &str) -> Result<Self, RegionError> {
        let s = s.trim();
        let bad = || RegionError::Parse(s.to_string());
        if let Some(rest) = s.strip_prefix('!') {
            return Ok(rest.parse::<Region>()?.complement());
        }
        match s {
            "C" => return Ok(Region::Plane),
            "H" => return Ok(Region::UpperHalfPlane),
            "R" => return Ok(Region::RealLine),
            "RHP" => return Ok(Region::ClosedRightHalfPlane),
            "ray" => return Ok(Region::NonNegativeRay),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("S:") {
            let parse_c = |t: &str| -> Result<f64, RegionError> {
                let c: f64 = t.parse().map_err(|_| bad())?;
                if c.is_nan() || c < 0.0 {
                    return Err(bad());
                }
                Ok(c)
            };
            return match rest.split_once("^1/") {
                Some((c, p)) => {
                    let p: u32 = p.parse().map_err(|_| bad())?;
                    if p == 0 {
                        return Err(bad());
                    }
                    Ok(Region::SectorRoot { c: parse_c(c)?, p })
                }
                None => Ok(Region::Sector(parse_c(rest)?)),
            };
        }
        if let Some(rest) = s.strip_prefix("D:") {
            let r: f64 = rest.parse().map_err(|_| bad())?;
            if !(r > 0.0 && r.is_finite()) {
                return Err(bad());
            }
            return Ok(Region::Disk(r));
        }
        Err(bad())
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Plane => write!(f, "C"),
            Region::UpperHalfPlane => write!(f, "H"),
            Region::RealLine => write!(f, "R"),
            Region::ClosedRightHalfPlane => write!(f, "RHP"),
            Region::Sector(c) => write!(f, "S:{c}"),
            Region::SectorRoot { c, p } => write!(f, "S:{c}^1/{p}"),
            Region::Disk(r) => write!(f, "D:{r}"),
            Region::NonNegativeRay => write!(f, "ray"),
            Region::Complement(inner) => write!(f, "!{inner}"),
        }
    }
}

impl Serialize for Region {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Multiplicity-weighted number of computed roots inside `region`.
pub fn count_in(roots: &RootSet, region: &Region, tol: f64) -> usize {
    roots
        .roots
        .iter()
        .filter(|r| region.contains(r.z, tol))
        .map(|r| r.multiplicity)
        .sum()
}

/// `N(p; X)`. The zero polynomial and nonzero constants have no zeros.
pub fn count_zeros(p: &Polynomial, region: &Region, tol: f64) -> Result<usize, RootError> {
    match p.degree() {
        None | Some(0) => Ok(0),
        _ => Ok(count_in(&find_roots_default(p)?, region, tol)),
    }
}

fn check_q_max(q_max: u32) -> Result<(), RegionError> {
    if q_max < 2 || !q_max.is_multiple_of(2) {
        return Err(RegionError::BadExponentBound(q_max));
    }
    Ok(())
}

fn power_in_right_half_plane(z: Complex, q: u32) -> bool {
    let r = z.norm();
    if r == 0.0 {
        return true;
    }
    let w = (z / r).powu(q);
    w.re >= -DEFAULT_REGION_TOL * (1.0 + w.norm())
}

/// Smallest even `q <= q_max` with every `z^q` in the closed right half plane.
pub fn find_even_power(points: &[Complex], q_max: u32) -> Result<u32, RegionError> {
    check_q_max(q_max)?;
    (2..=q_max)
        .step_by(2)
        .find(|&q| points.iter().all(|&z| power_in_right_half_plane(z, q)))
        .ok_or(RegionError::NotFound { q_max })
}

/// Result of the randomized covering search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cover {
    pub exponents: Vec<u32>,
    pub points_per_tuple: usize,
    pub q_max: u32,
    pub trials: usize,
    /// Fraction of a second, independent batch of `trials` tuples covered by
    /// `exponents`.
    pub verified_coverage: f64,
    pub seed: u64,
}

/// Greedy set cover: repeatedly takes the exponent covering the most
/// still-uncovered tuples (smallest exponent on ties).
pub fn greedy_cover(tuples: &[Vec<Complex>], q_max: u32) -> Result<Vec<u32>, RegionError> {
    check_q_max(q_max)?;
    let qs: Vec<u32> = (2..=q_max).step_by(2).collect();
    let covers: Vec<Vec<bool>> = qs
        .iter()
        .map(|&q| {
            tuples
                .iter()
                .map(|t| t.iter().all(|&z| power_in_right_half_plane(z, q)))
                .collect()
        })
        .collect();
    let mut covered = vec![false; tuples.len()];
    let mut chosen = Vec::new();
    loop {
        let best = covers
            .iter()
            .enumerate()
            .map(|(i, col)| (i, col.iter().zip(&covered).filter(|(&c, &done)| c && !done).count()))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)));
        match best {
            Some((i, gain)) if gain > 0 => {
                chosen.push(qs[i]);
                for (done, &c) in covered.iter_mut().zip(&covers[i]) {
                    *done |= c;
                }
            }
            _ => break,
        }
    }
    if let Some(index) = covered.iter().position(|&c| !c) {
        return Err(RegionError::CoverageIncomplete {
            q_max,
            index,
            points: tuples[index].iter().map(|z| [z.re, z.im]).collect(),
        });
    }
    chosen.sort_unstable();
    Ok(chosen)
}

fn random_unit_tuples(rng: &mut ChaCha8Rng, n: usize, trials: usize) -> Vec<Vec<Complex>> {
    (0..trials)
        .map(|_| {
            (0..n)
                .map(|_| Complex::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
                .collect()
        })
        .collect()
}

/// Finite set of even exponents handling `trials` random unit-circle
/// `n`-tuples, checked against a fresh batch of the same size.
pub fn covering_exponents(n: usize, q_max: u32, trials: usize, seed: u64) -> Result<Cover, RegionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let training = random_unit_tuples(&mut rng, n, trials);
    let exponents = greedy_cover(&training, q_max)?;
    let check = random_unit_tuples(&mut rng, n, trials);
    let hits = check
        .iter()
        .filter(|t| {
            exponents
                .iter()
                .any(|&q| t.iter().all(|&z| power_in_right_half_plane(z, q)))
        })
        .count();
    Ok(Cover {
        exponents,
        points_per_tuple: n,
        q_max,
        trials,
        verified_coverage: if trials == 0 { 1.0 } else { hits as f64 / trials as f64 },
        seed,
    })
}
