//! Reciprocal power sums of zeros, `s_k = sum a_j^{-k}` and
//! `s~_k = sum |a_j|^{-k}`, together with the growth bounds and sector
//! inequalities built on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::poly::{Complex, PolyError, Polynomial};
use crate::regions::{Region, DEFAULT_REGION_TOL};
use crate::rootfind::{find_roots_default, RootError, RootSet};

/// Roots closer than `ORIGIN_TOL * max(1, max|root|)` to 0 are treated as zeros
/// at the origin, where the sums are undefined.
pub const ORIGIN_TOL: f64 = 1e-9;

/// Relative slack allowed before a sampled inequality counts as violated.
pub const CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SumsError {
    #[error("constant term is zero")]
    ConstantTermZero,
    #[error("root {0} lies at the origin")]
    RootAtOrigin(Complex),
    #[error("polynomial must satisfy p(0) = 1, got p(0) = {0}")]
    NormalizationError(Complex),
    #[error("root {0} lies outside the sector root region")]
    RootsOutsideSector(Complex),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Roots(#[from] RootError),
}

impl From<PolyError> for SumsError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::ConstantTermZero => SumsError::ConstantTermZero,
            other => SumsError::InvalidArgument(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SumSource {
    Coefficients,
    Roots,
}

/// `s_1..s_K`, and `s~_1..s~_K` when the zeros were available.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumTable {
    pub s: Vec<Complex>,
    pub s_tilde: Option<Vec<f64>>,
    pub source: SumSource,
    pub region: Option<Region>,
}

impl SumTable {
    /// `s_k` for 1-based `k`.
    pub fn s(&self, k: usize) -> Complex {
        self.s[k - 1]
    }

    pub fn s_tilde(&self, k: usize) -> Option<f64> {
        self.s_tilde.as_ref().map(|t| t[k - 1])
    }

    /// `k,re,im,s_tilde` rows; the last column is empty without zeros.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,re,im,s_tilde\n");
        for (i, s) in self.s.iter().enumerate() {
            let tilde = self.s_tilde(i + 1).map(|t| t.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", i + 1, s.re + 0.0, s.im + 0.0, tilde));
        }
        out
    }
}

/// `s_k = -[z^{k-1}] (p'/p)`, for `k = 1..=order`.
pub fn power_sums_from_coeffs(p: &Polynomial, order: usize) -> Result<SumTable, SumsError> {
    if order == 0 {
        return Err(SumsError::InvalidArgument("order must be positive".into()));
    }
    let series = p.log_derivative_series(order - 1)?;
    Ok(SumTable {
        s: series.coeffs().iter().map(|c| -c).collect(),
        s_tilde: None,
        source: SumSource::Coefficients,
        region: None,
    })
}

/// Region-restricted sums over computed zeros, weighted by multiplicity.
pub fn power_sums_from_roots(roots: &RootSet, order: usize, region: &Region) -> Result<SumTable, SumsError> {
    if order == 0 {
        return Err(SumsError::InvalidArgument("order must be positive".into()));
    }
    let biggest = roots.roots.iter().map(|r| r.z.norm()).fold(1.0_f64, f64::max);
    if let Some(r) = roots.roots.iter().find(|r| r.z.norm() <= ORIGIN_TOL * biggest) {
        return Err(SumsError::RootAtOrigin(r.z));
    }
    let mut s = vec![Complex::new(0.0, 0.0); order];
    let mut s_tilde = vec![0.0; order];
    for root in roots.roots.iter().filter(|r| region.contains(r.z, DEFAULT_REGION_TOL)) {
        let w = root.z.inv();
        let m = root.multiplicity as f64;
        let mut power = Complex::new(1.0, 0.0);
        for k in 0..order {
            power *= w;
            s[k] += power * m;
            s_tilde[k] += power.norm() * m;
        }
    }
    Ok(SumTable {
        s,
        s_tilde: Some(s_tilde),
        source: SumSource::Roots,
        region: Some(region.clone()),
    })
}

/// Log-radial by angular sampling grid for the factor-constant search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub radial: usize,
    pub angular: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            radial: 601,
            angular: 720,
            r_min: 1e-3,
            r_max: 1e3,
        }
    }
}

impl GridSpec {
    /// Doubles the resolution; every point of `self` stays on the new grid,
    /// so the sampled supremum cannot decrease.
    pub fn refined(&self) -> Self {
        Self {
            radial: 2 * self.radial - 1,
            angular: 2 * self.angular,
            ..*self
        }
    }

    fn points(&self) -> impl Iterator<Item = Complex> + '_ {
        let log_ratio = (self.r_max / self.r_min).ln();
        let steps = (self.radial.max(2) - 1) as f64;
        (0..self.radial).flat_map(move |i| {
            let r = self.r_min * (log_ratio * i as f64 / steps).exp();
            (0..self.angular)
                .map(move |j| Complex::from_polar(r, std::f64::consts::TAU * j as f64 / self.angular as f64))
        })
    }
}

/// Sampled supremum with its location.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorEstimate {
    pub p: u32,
    pub value: f64,
    pub argmax: [f64; 2],
    pub grid: GridSpec,
}

/// `(log|1 - z| + Re sum_{k<p} z^k/k) / |z|^p`.
pub fn factor_supremand(z: Complex, p: u32) -> f64 {
    let mut power = Complex::new(1.0, 0.0);
    let mut partial = 0.0;
    for k in 1..p {
        power *= z;
        partial += power.re / k as f64;
    }
    ((Complex::new(1.0, 0.0) - z).norm().ln() + partial) / z.norm().powi(p as i32)
}

/// Numerical estimate of the smallest `c_p` with
/// `|1 - z| <= exp(-Re sum_{k<p} z^k/k + c_p |z|^p)` for all `z`.
///
/// Samples exclude the `1e-6` neighbourhood of `z = 1`.
pub fn estimate_factor_constant(p: u32, grid: &GridSpec) -> Result<FactorEstimate, SumsError> {
    if p < 2 {
        return Err(SumsError::InvalidArgument(format!("p must be >= 2, got {p}")));
    }
    if grid.radial < 2 || grid.angular < 1 || !(grid.r_min > 0.0 && grid.r_max > grid.r_min) {
        return Err(SumsError::InvalidArgument("degenerate grid".into()));
    }
    let mut best = (f64::NEG_INFINITY, Complex::new(0.0, 0.0));
    for z in grid.points() {
        if (z - 1.0).norm() < 1e-6 {
            continue;
        }
        let v = factor_supremand(z, p);
        if v > best.0 {
            best = (v, z);
        }
    }
    Ok(FactorEstimate {
        p,
        value: best.0,
        argmax: [best.1.re, best.1.im],
        grid: *grid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthViolation {
    pub z: [f64; 2],
    pub log_abs_p: f64,
    pub exponent: f64,
}

/// Outcome of sampling `log|p(z)| <= exponent(z)`; slack = exponent - log|p|.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub p_idx: u32,
    pub c_p: f64,
    pub samples: usize,
    pub min_slack: f64,
    pub max_slack: f64,
    pub violations: Vec<GrowthViolation>,
}

/// Samples the growth bound `|p(z)| <= e^{s~_1 |z|}` (`p_idx = 1`) or
/// `|p(z)| <= exp(-Re sum_{k<p} s_k z^k / k + c_p s~_p |z|^p)` at `z = 0`
/// plus `samples - 1` uniform points of the disk `|z| <= 10`.
pub fn check_growth_bound(
    p: &Polynomial,
    p_idx: u32,
    c_p: f64,
    samples: usize,
    seed: u64,
) -> Result<GrowthReport, SumsError> {
    let one = Complex::new(1.0, 0.0);
    if (p.coeff(0) - one).norm() > 1e-12 {
        return Err(SumsError::NormalizationError(p.coeff(0)));
    }
    if p_idx == 0 {
        return Err(SumsError::InvalidArgument("p_idx must be positive".into()));
    }
    let order = p_idx as usize;
    let table = match p.degree() {
        Some(d) if d >= 1 => power_sums_from_roots(&find_roots_default(p)?, order, &Region::Plane)?,
        _ => SumTable {
            s: vec![Complex::new(0.0, 0.0); order],
            s_tilde: Some(vec![0.0; order]),
            source: SumSource::Roots,
            region: Some(Region::Plane),
        },
    };
    let s_tilde_p = table.s_tilde(order).unwrap_or(0.0);
    let exponent = |z: Complex| -> f64 {
        if p_idx == 1 {
            return s_tilde_p * z.norm();
        }
        let mut power = one;
        let mut partial = 0.0;
        for k in 1..order {
            power *= z;
            partial += (table.s(k) * power).re / k as f64;
        }
        -partial + c_p * s_tilde_p * z.norm().powi(p_idx as i32)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = GrowthReport {
        p_idx,
        c_p,
        samples,
        min_slack: f64::INFINITY,
        max_slack: f64::NEG_INFINITY,
        violations: Vec::new(),
    };
    for i in 0..samples {
        let z = if i == 0 {
            Complex::new(0.0, 0.0)
        } else {
            let r = 10.0 * rng.random::<f64>().sqrt();
            Complex::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
        };
        let lhs = p.evaluate(z).norm().ln();
        let rhs = exponent(z);
        let slack = rhs - lhs;
        report.min_slack = report.min_slack.min(slack);
        report.max_slack = report.max_slack.max(slack);
        if slack < -CHECK_TOL * (1.0 + rhs.abs()) {
            report.violations.push(GrowthViolation {
                z: [z.re, z.im],
                log_abs_p: lhs,
                exponent: rhs,
            });
        }
    }
    Ok(report)
}

/// The two sector inequalities for a root set split along `S_c^{1/p}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorReport {
    pub c: f64,
    pub c1: f64,
    pub p_idx: u32,
    pub inner_count: usize,
    pub outer_count: usize,
    /// `sqrt(1+c^2) Re s_p(g) - s~_p(g)`.
    pub inner_slack: f64,
    /// `Re s_p(f) - Re s_p(g)`.
    pub inner_total_slack: f64,
    /// `-sqrt(1+c1^2) Re s_{2p}(h) - s~_{2p}(h)`.
    pub outer_slack: f64,
    /// `sqrt(1+c1^2) |s_{2p}(h)| - s~_{2p}(h)`.
    pub outer_abs_slack: f64,
    pub violations: Vec<String>,
}

/// Splits zeros into `g` (inside `S_c^{1/p}`) and `h` (in `S_inf^{1/p}` but
/// outside `S_c^{1/p}`) and measures
/// `s~_p(g) <= sqrt(1+c^2) Re s_p(g) <= sqrt(1+c^2) Re s_p(f)` and
/// `s~_{2p}(h) <= -sqrt(1+c1^2) Re s_{2p}(h) <= sqrt(1+c1^2) |s_{2p}(h)|`
/// with `c1 = 2c/(c^2 - 1)`.
pub fn sector_sum_inequalities(roots: &RootSet, c: f64, p_idx: u32) -> Result<SectorReport, SumsError> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(SumsError::InvalidArgument(format!(
            "c must be a finite number > 1, got {c}"
        )));
    }
    if p_idx == 0 {
        return Err(SumsError::InvalidArgument("p_idx must be positive".into()));
    }
    let biggest = roots.roots.iter().map(|r| r.z.norm()).fold(1.0_f64, f64::max);
    if let Some(r) = roots.roots.iter().find(|r| r.z.norm() <= ORIGIN_TOL * biggest) {
        return Err(SumsError::RootAtOrigin(r.z));
    }
    let inner_region = Region::SectorRoot { c, p: p_idx };
    let outer_region = Region::SectorRoot {
        c: f64::INFINITY,
        p: p_idx,
    };
    let c1 = 2.0 * c / (c * c - 1.0);
    let (mut s_g, mut t_g, mut s_f) = (Complex::new(0.0, 0.0), 0.0, Complex::new(0.0, 0.0));
    let (mut s_h, mut t_h) = (Complex::new(0.0, 0.0), 0.0);
    let (mut inner_count, mut outer_count) = (0, 0);
    for root in &roots.roots {
        let m = root.multiplicity as f64;
        let wp = root.z.inv().powu(p_idx);
        s_f += wp * m;
        if inner_region.contains(root.z, DEFAULT_REGION_TOL) {
            s_g += wp * m;
            t_g += wp.norm() * m;
            inner_count += root.multiplicity;
        } else if outer_region.contains(root.z, DEFAULT_REGION_TOL) {
            let w2p = wp * wp;
            s_h += w2p * m;
            t_h += w2p.norm() * m;
            outer_count += root.multiplicity;
        } else {
            return Err(SumsError::RootsOutsideSector(root.z));
        }
    }
    let k = (1.0 + c * c).sqrt();
    let k1 = (1.0 + c1 * c1).sqrt();
    let inner_slack = k * s_g.re - t_g;
    let inner_total_slack = s_f.re - s_g.re;
    let outer_slack = -k1 * s_h.re - t_h;
    let outer_abs_slack = k1 * s_h.norm() - t_h;

    let mut violations = Vec::new();
    let g_scale = 1.0 + k * t_g;
    let h_scale = 1.0 + k1 * t_h;
    if inner_slack < -CHECK_TOL * g_scale {
        violations.push("inner: s~_p(g) <= sqrt(1+c^2) Re s_p(g)".to_string());
    }
    if inner_total_slack < -CHECK_TOL * (1.0 + s_f.norm() + t_g) {
        violations.push("inner: Re s_p(g) <= Re s_p(f)".to_string());
    }
    if outer_slack < -CHECK_TOL * h_scale {
        violations.push("outer: s~_2p(h) <= -sqrt(1+c1^2) Re s_2p(h)".to_string());
    }
    if outer_abs_slack < -CHECK_TOL * h_scale {
        violations.push("outer: s~_2p(h) <= sqrt(1+c1^2) |s_2p(h)|".to_string());
    }
    Ok(SectorReport {
        c,
        c1,
        p_idx,
        inner_count,
        outer_count,
        inner_slack,
        inner_total_slack,
        outer_slack,
        outer_abs_slack,
        violations,
    })
}
