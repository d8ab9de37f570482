//! Weak and strong convergence diagnostics for polynomial sequences, the
//! builtin test sequences, and empirical harnesses for the convergence
//! theorems.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, TAU};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::io::{read_polynomial, IoError};
use crate::jensen::{jensen_sequence_member, JensenError};
use crate::poly::{Complex, Polynomial};
use crate::powersums::{power_sums_from_roots, sector_sum_inequalities};
use crate::regions::{Region, DEFAULT_REGION_TOL};
use crate::rootfind::{find_roots_default, Root, RootError, RootSet};
use crate::series::PowerSeries;

/// Threshold below which an estimated limit coefficient counts as zero.
pub const DEFAULT_EPS: f64 = 1e-8;
pub const DEFAULT_K_MAX: usize = 8;
pub const DEFAULT_SAMPLES: usize = 256;
pub const MIN_SAMPLES: usize = 64;
/// Largest index a builtin generator serves.
pub const MAX_BUILTIN_INDEX: usize = 4096;
/// Members up to this degree get the Gauss-Lucas spot check.
const GAUSS_LUCAS_MAX_DEGREE: usize = 32;

#[derive(Debug, Error)]
pub enum ConvergenceError {
    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("hypothesis '{hypothesis}' violated: {witness}")]
    HypothesisViolated {
        hypothesis: String,
        witness: Witness,
        report: Box<ConvergenceReport>,
    },
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error(transparent)]
    Jensen(#[from] JensenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Generator {
    #[serde(rename = "jensen-of-exp")]
    JensenOfExp,
    #[serde(rename = "jensen-of-cos")]
    JensenOfCos,
    #[serde(rename = "binom")]
    Binom,
    #[serde(rename = "monomial")]
    Monomial,
    #[serde(rename = "h-random")]
    HRandom,
    #[serde(rename = "real-with-k-nonreal")]
    RealWithKNonreal,
    #[serde(rename = "sector-random")]
    SectorRandom,
}

impl Generator {
    pub const ALL: [Generator; 7] = [
        Generator::JensenOfExp,
        Generator::JensenOfCos,
        Generator::Binom,
        Generator::Monomial,
        Generator::HRandom,
        Generator::RealWithKNonreal,
        Generator::SectorRandom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Generator::JensenOfExp => "jensen-of-exp",
            Generator::JensenOfCos => "jensen-of-cos",
            Generator::Binom => "binom",
            Generator::Monomial => "monomial",
            Generator::HRandom => "h-random",
            Generator::RealWithKNonreal => "real-with-k-nonreal",
            Generator::SectorRandom => "sector-random",
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = ConvergenceError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| ConvergenceError::UnknownGenerator(s.to_string()))
    }
}

/// Generator parameters. Only the fields a generator reads affect it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenParams {
    /// `h-random`, `sector-random`.
    pub seed: u64,
    /// Number of non-real zeros for `real-with-k-nonreal`; must be even.
    pub k: usize,
    /// Sector opening for `sector-random`.
    pub c: f64,
    /// Root order for `sector-random`.
    pub p: u32,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            seed: 0,
            k: 2,
            c: 2.0,
            p: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SequenceSource {
    Builtin { generator: Generator, params: GenParams },
    Files { paths: Vec<PathBuf> },
}

/// A deterministic, indexable polynomial sequence `f_first, ..., f_last`.
#[derive(Debug, Clone)]
pub struct PolySequence {
    source: SequenceSource,
    loaded: Vec<Polynomial>,
    first: usize,
    last: usize,
    derivative: usize,
}

/// A member with its zeros when the generator knows them exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub n: usize,
    pub poly: Polynomial,
    pub known_zeros: Option<Vec<Root>>,
}

/// A generator as a sequence over `1..=MAX_BUILTIN_INDEX`.
pub fn builtin_sequence(id: &str, params: GenParams) -> Result<PolySequence, ConvergenceError> {
    let generator: Generator = id.parse()?;
    match generator {
        Generator::RealWithKNonreal if !params.k.is_multiple_of(2) => {
            return Err(ConvergenceError::InvalidArgument(format!(
                "real-with-k-nonreal needs an even k, got {}",
                params.k
            )))
        }
        Generator::SectorRandom if params.c.is_nan() || params.c < 0.0 || params.p == 0 => {
            return Err(ConvergenceError::InvalidArgument(
                "sector-random needs c >= 0 and p >= 1".into(),
            ))
        }
        _ => {}
    }
    Ok(PolySequence {
        source: SequenceSource::Builtin { generator, params },
        loaded: Vec::new(),
        first: 1,
        last: MAX_BUILTIN_INDEX,
        derivative: 0,
    })
}

fn root(z: Complex, multiplicity: usize) -> Root {
    Root { z, multiplicity }
}

/// `prod (1 - z/zeta_j)`.
fn normalized_product(zeros: &[Complex]) -> Polynomial {
    let mut c = Vec::with_capacity(zeros.len() + 1);
    c.push(Complex::new(1.0, 0.0));
    for zeta in zeros {
        let w = -zeta.inv();
        c.push(Complex::new(0.0, 0.0));
        for i in (1..c.len()).rev() {
            let prev = c[i - 1];
            c[i] += prev * w;
        }
    }
    Polynomial::from_vec(c)
}

/// Per-index stream so that zero `j` depends only on `(seed, j)`.
fn stream_rng(seed: u64, j: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(j as u64);
    rng
}

fn h_random_zero(seed: u64, j: usize) -> Complex {
    let theta = stream_rng(seed, j).random_range(FRAC_PI_4..=3.0 * FRAC_PI_4);
    Complex::from_polar((j * j) as f64, theta)
}

fn sector_random_zero(seed: u64, j: usize, c: f64, p: u32) -> Complex {
    let half = c.atan() / p as f64;
    let phi = if half > 0.0 {
        stream_rng(seed, j).random_range(-half..=half)
    } else {
        0.0
    };
    Complex::from_polar((j * j) as f64, phi)
}

fn generate(generator: Generator, params: &GenParams, n: usize) -> Result<Member, ConvergenceError> {
    let nf = n as f64;
    let member = match generator {
        Generator::JensenOfExp | Generator::Binom => Member {
            n,
            poly: jensen_sequence_member(&PowerSeries::exp(n), n)?,
            known_zeros: Some(vec![root(Complex::new(-nf, 0.0), n)]),
        },
        Generator::JensenOfCos => Member {
            n,
            poly: jensen_sequence_member(&PowerSeries::cos(n), n)?,
            known_zeros: None,
        },
        Generator::Monomial => Member {
            n,
            poly: Polynomial::monomial(n),
            known_zeros: Some(vec![root(Complex::new(0.0, 0.0), n)]),
        },
        Generator::HRandom => {
            let zeros: Vec<Complex> = (1..=n).map(|j| h_random_zero(params.seed, j)).collect();
            Member {
                n,
                poly: normalized_product(&zeros),
                known_zeros: Some(zeros.into_iter().map(|z| root(z, 1)).collect()),
            }
        }
        Generator::SectorRandom => {
            let zeros: Vec<Complex> = (1..=n)
                .map(|j| sector_random_zero(params.seed, j, params.c, params.p))
                .collect();
            Member {
                n,
                poly: normalized_product(&zeros),
                known_zeros: Some(zeros.into_iter().map(|z| root(z, 1)).collect()),
            }
        }
        Generator::RealWithKNonreal => {
            // (1 + z/n)^n prod_{m <= k/2} (1 + z^2/m^2)
            let mut poly = jensen_sequence_member(&PowerSeries::exp(n), n)?;
            let mut zeros = vec![root(Complex::new(-nf, 0.0), n)];
            for m in 1..=params.k / 2 {
                let mf = m as f64;
                let quad = Polynomial::from_real(&[1.0, 0.0, 1.0 / (mf * mf)]).expect("finite");
                poly = &poly * &quad;
                zeros.push(root(Complex::new(0.0, mf), 1));
                zeros.push(root(Complex::new(0.0, -mf), 1));
            }
            Member {
                n,
                poly,
                known_zeros: Some(zeros),
            }
        }
    };
    Ok(member)
}

impl PolySequence {
    /// Members `f_1, ..., f_len` read from polynomial files in the given order.
    pub fn from_files(paths: Vec<PathBuf>) -> Result<Self, ConvergenceError> {
        if paths.is_empty() {
            return Err(ConvergenceError::InvalidArgument("no sequence files".into()));
        }
        let loaded = paths
            .iter()
            .map(|p| read_polynomial(p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_polynomials(SequenceSource::Files { paths }, loaded))
    }

    /// Members `f_1, ..., f_len` given in memory.
    pub fn from_members(members: Vec<Polynomial>) -> Result<Self, ConvergenceError> {
        if members.is_empty() {
            return Err(ConvergenceError::InvalidArgument("empty sequence".into()));
        }
        Ok(Self::from_polynomials(
            SequenceSource::Files { paths: Vec::new() },
            members,
        ))
    }

    fn from_polynomials(source: SequenceSource, loaded: Vec<Polynomial>) -> Self {
        let last = loaded.len();
        Self {
            source,
            loaded,
            first: 1,
            last,
            derivative: 0,
        }
    }

    /// The sequence of `k`-th derivatives of the members.
    pub fn derivative(&self, k: usize) -> Self {
        Self {
            derivative: self.derivative + k,
            ..self.clone()
        }
    }

    pub fn source(&self) -> &SequenceSource {
        &self.source
    }

    pub fn range(&self) -> (usize, usize) {
        (self.first, self.last)
    }

    pub fn label(&self) -> String {
        let base = match &self.source {
            SequenceSource::Builtin { generator, .. } => generator.to_string(),
            SequenceSource::Files { paths } => format!("files[{}]", paths.len().max(self.loaded.len())),
        };
        if self.derivative > 0 {
            format!("{base}^({})", self.derivative)
        } else {
            base
        }
    }

    pub fn member(&self, n: usize) -> Result<Member, ConvergenceError> {
        if n < self.first || n > self.last {
            return Err(ConvergenceError::InvalidArgument(format!(
                "index {n} outside {}..={}",
                self.first, self.last
            )));
        }
        let mut m = match &self.source {
            SequenceSource::Builtin { generator, params } => generate(*generator, params, n)?,
            SequenceSource::Files { .. } => Member {
                n,
                poly: self.loaded[n - self.first].clone(),
                known_zeros: None,
            },
        };
        if self.derivative > 0 {
            m.poly = m.poly.derivative(self.derivative);
            m.known_zeros = None;
        }
        Ok(m)
    }

    /// Members for each distinct index, computed independently.
    pub fn members(&self, indices: &[usize]) -> Result<BTreeMap<usize, Member>, ConvergenceError> {
        let mut unique = indices.to_vec();
        unique.sort_unstable();
        unique.dedup();
        let list = par_map(&unique, |&n| self.member(n))?;
        Ok(list.into_iter().map(|m| (m.n, m)).collect())
    }

    /// `(n, 2n)` pairs with `n` a power of two, starting at 16 when the range
    /// allows it.
    pub fn dyadic_pairs(&self) -> Vec<(usize, usize)> {
        let pairs = |min: usize| -> Vec<(usize, usize)> {
            (0..usize::BITS - 1)
                .map(|i| 1usize << i)
                .filter(|&n| n >= min.max(self.first) && 2 * n <= self.last)
                .map(|n| (n, 2 * n))
                .collect()
        };
        let p = pairs(16);
        if p.is_empty() {
            pairs(1)
        } else {
            p
        }
    }

    /// Powers of two in `16..=512`, or all indices of a short sequence.
    pub fn default_window(&self) -> Vec<usize> {
        let w: Vec<usize> = (4..=9)
            .map(|i| 1usize << i)
            .filter(|&n| n >= self.first && n <= self.last)
            .collect();
        if w.len() >= 2 {
            w
        } else {
            (self.first..=self.last).collect()
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>, ConvergenceError>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U, ConvergenceError> + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>, ConvergenceError>
where
    F: Fn(&T) -> Result<U, ConvergenceError>,
{
    items.iter().map(f).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakReport {
    pub k_max: usize,
    pub window: Vec<usize>,
    pub eps: f64,
    /// `max |a_k(f_n) - a_k(f_m)|` over `n, m` in the window.
    pub oscillation: Vec<f64>,
    /// The same over the later half of the window.
    pub tail_oscillation: Vec<f64>,
    /// Mean of `a_k` over the last quarter of the window.
    pub limit_coeffs: Vec<[f64; 2]>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongEntry {
    pub radius: f64,
    pub n: usize,
    pub m: usize,
    /// `max |f_n(z) - f_m(z)|` over the sampled circle `|z| = radius`.
    pub sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrongReport {
    pub samples: usize,
    pub entries: Vec<StrongEntry>,
}

impl StrongReport {
    /// Sups at one radius in pair order.
    pub fn sups_at(&self, radius: f64) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|e| e.radius == radius)
            .map(|e| e.sup)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub n: Option<usize>,
    pub zero: Option<[f64; 2]>,
    pub detail: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.n {
            write!(f, "n = {n}: ")?;
        }
        if let Some([re, im]) = self.zero {
            write!(f, "zero {re}{im:+}i: ")?;
        }
        f.write_str(&self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRatios {
    pub radius: f64,
    /// `sup_{i+1} / sup_i` over consecutive pairs.
    pub ratios: Vec<f64>,
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub sequence: String,
    pub theorem: Option<TheoremId>,
    pub weak: Option<WeakReport>,
    pub strong: Option<StrongReport>,
    pub hypothesis_checks: Vec<HypothesisCheck>,
    /// Checks that inform but do not gate the conclusion.
    pub diagnostics: Vec<HypothesisCheck>,
    pub decay: Vec<DecayRatios>,
    /// `Some(true)` when every radius shows monotone decay; `None` when the
    /// conclusion was not tested.
    pub conclusion_holds: Option<bool>,
}

impl ConvergenceReport {
    fn empty(seq: &PolySequence) -> Self {
        Self {
            sequence: seq.label(),
            theorem: None,
            weak: None,
            strong: None,
            hypothesis_checks: Vec::new(),
            diagnostics: Vec::new(),
            decay: Vec::new(),
            conclusion_holds: None,
        }
    }

    pub fn failed_hypotheses(&self) -> Vec<&str> {
        self.hypothesis_checks
            .iter()
            .filter(|h| !h.passed)
            .map(|h| h.name.as_str())
            .collect()
    }
}

fn oscillation(members: &[&Member], k: usize) -> f64 {
    let mut worst = 0.0_f64;
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            worst = worst.max((a.poly.coeff(k) - b.poly.coeff(k)).norm());
        }
    }
    worst
}

fn weak_from_members(members: &BTreeMap<usize, Member>, window: &[usize], k_max: usize, eps: f64) -> WeakReport {
    let in_window: Vec<&Member> = window.iter().map(|n| &members[n]).collect();
    let tail = &in_window[in_window.len() / 2..];
    let last = &in_window[in_window.len() - (in_window.len() / 4).max(1)..];
    let limit_coeffs: Vec<Complex> = (0..=k_max)
        .map(|k| last.iter().map(|m| m.poly.coeff(k)).sum::<Complex>() / last.len() as f64)
        .collect();
    WeakReport {
        k_max,
        window: window.to_vec(),
        eps,
        oscillation: (0..=k_max).map(|k| oscillation(&in_window, k)).collect(),
        tail_oscillation: (0..=k_max).map(|k| oscillation(tail, k)).collect(),
        degenerate: limit_coeffs.iter().all(|c| c.norm() <= eps),
        limit_coeffs: limit_coeffs.iter().map(|c| [c.re, c.im]).collect(),
    }
}

fn check_window(seq: &PolySequence, window: &[usize]) -> Result<Vec<usize>, ConvergenceError> {
    let mut w = window.to_vec();
    w.sort_unstable();
    w.dedup();
    let (first, last) = seq.range();
    if w.is_empty() {
        return Err(ConvergenceError::InvalidArgument("empty probe window".into()));
    }
    if w[0] < first || w[w.len() - 1] > last {
        return Err(ConvergenceError::InvalidArgument(format!(
            "window {}..={} outside sequence range {first}..={last}",
            w[0],
            w[w.len() - 1]
        )));
    }
    Ok(w)
}

/// Coefficient oscillation and limit estimates for `a_0..a_{k_max}` over the
/// members listed in `window`.
pub fn weak_convergence_probe(
    seq: &PolySequence,
    k_max: usize,
    window: &[usize],
    eps: f64,
) -> Result<ConvergenceReport, ConvergenceError> {
    let window = check_window(seq, window)?;
    let members = seq.members(&window)?;
    let mut report = ConvergenceReport::empty(seq);
    report.weak = Some(weak_from_members(&members, &window, k_max, eps));
    Ok(report)
}

fn circle(radius: f64, samples: usize) -> Vec<Complex> {
    (0..samples)
        .map(|j| Complex::from_polar(radius, TAU * j as f64 / samples as f64))
        .collect()
}

fn strong_from_members(
    members: &BTreeMap<usize, Member>,
    radii: &[f64],
    samples: usize,
    pairs: &[(usize, usize)],
) -> Result<StrongReport, ConvergenceError> {
    let jobs: Vec<(f64, usize, usize)> = radii
        .iter()
        .flat_map(|&r| pairs.iter().map(move |&(n, m)| (r, n, m)))
        .collect();
    let entries = par_map(&jobs, |&(radius, n, m)| {
        let (a, b) = (&members[&n].poly, &members[&m].poly);
        let sup = circle(radius, samples)
            .into_iter()
            .map(|z| (a.evaluate(z) - b.evaluate(z)).norm())
            .fold(0.0, f64::max);
        Ok(StrongEntry { radius, n, m, sup })
    })?;
    Ok(StrongReport { samples, entries })
}

fn check_strong_args(
    seq: &PolySequence,
    radii: &[f64],
    samples: usize,
    pairs: &[(usize, usize)],
) -> Result<(), ConvergenceError> {
    if samples < MIN_SAMPLES {
        return Err(ConvergenceError::InvalidArgument(format!(
            "samples must be >= {MIN_SAMPLES}, got {samples}"
        )));
    }
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(ConvergenceError::InvalidArgument("radii must be positive".into()));
    }
    let (first, last) = seq.range();
    if pairs.is_empty() {
        return Err(ConvergenceError::InvalidArgument("no index pairs".into()));
    }
    if let Some(&(n, m)) = pairs.iter().find(|&&(n, m)| n.min(m) < first || n.max(m) > last) {
        return Err(ConvergenceError::InvalidArgument(format!(
            "pair ({n}, {m}) outside sequence range {first}..={last}"
        )));
    }
    Ok(())
}

/// Sampled sup-norm differences `max_{|z|=r} |f_n(z) - f_m(z)|`.
pub fn strong_convergence_probe(
    seq: &PolySequence,
    radii: &[f64],
    samples: usize,
    pairs: &[(usize, usize)],
) -> Result<ConvergenceReport, ConvergenceError> {
    check_strong_args(seq, radii, samples, pairs)?;
    let indices: Vec<usize> = pairs.iter().flat_map(|&(n, m)| [n, m]).collect();
    let members = seq.members(&indices)?;
    let mut report = ConvergenceReport::empty(seq);
    report.strong = Some(strong_from_members(&members, radii, samples, pairs)?);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremId {
    /// Zeros in the closed upper half plane.
    T1_1,
    /// Real coefficients, bounded number of non-real zeros.
    T1_2,
    /// Bounded `s~_p`.
    T2_3,
    /// Zeros in `S_inf^{1/p}`.
    T2_4,
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoremId::T1_1 => "T1.1",
            TheoremId::T1_2 => "T1.2",
            TheoremId::T2_3 => "T2.3",
            TheoremId::T2_4 => "T2.4",
        })
    }
}

impl FromStr for TheoremId {
    type Err = ConvergenceError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "T1.1" => Ok(TheoremId::T1_1),
            "T1.2" => Ok(TheoremId::T1_2),
            "T2.3" => Ok(TheoremId::T2_3),
            "T2.4" => Ok(TheoremId::T2_4),
            _ => Err(ConvergenceError::InvalidArgument(format!("unknown theorem '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremParams {
    /// Exponent for the power-sum and sector hypotheses.
    pub p: u32,
    /// Bound on `s~_p` for T2.3.
    pub m_bound: Option<f64>,
    /// Bound on the non-real zero count for T1.2.
    pub nonreal_bound: Option<usize>,
    pub radii: Vec<f64>,
    pub pairs: Vec<(usize, usize)>,
    pub samples: usize,
    pub k_max: usize,
    pub window: Option<Vec<usize>>,
    pub eps: f64,
    pub tol: f64,
}

impl Default for TheoremParams {
    fn default() -> Self {
        Self {
            p: 1,
            m_bound: None,
            nonreal_bound: None,
            radii: vec![1.0, 2.0],
            pairs: vec![(16, 32), (32, 64), (64, 128)],
            samples: DEFAULT_SAMPLES,
            k_max: DEFAULT_K_MAX,
            window: None,
            eps: DEFAULT_EPS,
            tol: DEFAULT_REGION_TOL,
        }
    }
}

fn zeros_of(member: &Member) -> Result<Vec<Root>, ConvergenceError> {
    if let Some(z) = &member.known_zeros {
        return Ok(z.clone());
    }
    match member.poly.degree() {
        None | Some(0) => Ok(Vec::new()),
        _ => Ok(find_roots_default(&member.poly)?.roots),
    }
}

fn zero_witness(n: usize, z: Complex, detail: impl Into<String>) -> Witness {
    Witness {
        n: Some(n),
        zero: Some([z.re, z.im]),
        detail: detail.into(),
    }
}

fn pass(name: &str) -> HypothesisCheck {
    HypothesisCheck {
        name: name.to_string(),
        passed: true,
        witness: None,
    }
}

fn fail(name: &str, witness: Witness) -> HypothesisCheck {
    HypothesisCheck {
        name: name.to_string(),
        passed: false,
        witness: Some(witness),
    }
}

/// First member zero outside `region`.
fn zeros_confined(name: &str, zeros: &BTreeMap<usize, Vec<Root>>, region: &Region, tol: f64) -> HypothesisCheck {
    for (&n, roots) in zeros {
        if let Some(r) = roots.iter().find(|r| !region.contains(r.z, tol)) {
            return fail(name, zero_witness(n, r.z, format!("zero outside {region}")));
        }
    }
    pass(name)
}

fn as_root_set(roots: &[Root]) -> RootSet {
    RootSet {
        roots: roots.to_vec(),
        residuals: vec![0.0; roots.len()],
        converged: true,
        backward_errors: vec![0.0; roots.len()],
    }
}

/// Checks the hypotheses of `theorem` on the members in the probe window and
/// the index pairs, then measures strong decay across the pairs.
///
/// A failed hypothesis yields [`ConvergenceError::HypothesisViolated`] carrying
/// the full report, with the conclusion left untested.
pub fn validate_theorem(
    seq: &PolySequence,
    theorem: TheoremId,
    params: &TheoremParams,
) -> Result<ConvergenceReport, ConvergenceError> {
    let window = match &params.window {
        Some(w) => check_window(seq, w)?,
        None => seq.default_window(),
    };
    check_strong_args(seq, &params.radii, params.samples, &params.pairs)?;
    if params.p == 0 {
        return Err(ConvergenceError::InvalidArgument("p must be positive".into()));
    }
    let m_bound = match (theorem, params.m_bound) {
        (TheoremId::T2_3, None) => {
            return Err(ConvergenceError::InvalidArgument("T2.3 needs a bound M".into()));
        }
        (_, m) => m,
    };
    let nonreal_bound = match (theorem, params.nonreal_bound) {
        (TheoremId::T1_2, None) => {
            return Err(ConvergenceError::InvalidArgument(
                "T1.2 needs a non-real zero bound".into(),
            ));
        }
        (_, b) => b,
    };

    let mut indices = window.clone();
    indices.extend(params.pairs.iter().flat_map(|&(n, m)| [n, m]));
    let members = seq.members(&indices)?;
    let weak = weak_from_members(&members, &window, params.k_max, params.eps);

    let mut report = ConvergenceReport::empty(seq);
    report.theorem = Some(theorem);
    let mut checks = Vec::new();

    let limit_name = "nonzero limit coefficient";
    checks.push(if weak.degenerate {
        fail(
            limit_name,
            Witness {
                n: window.last().copied(),
                zero: None,
                detail: format!(
                    "every estimated limit coefficient a_0..a_{} is within {}",
                    params.k_max, params.eps
                ),
            },
        )
    } else {
        pass(limit_name)
    });

    let weak_name = "weak convergence";
    let scale = |k: usize| 1.0 + weak.limit_coeffs[k][0].hypot(weak.limit_coeffs[k][1]);
    match (0..=params.k_max).find(|&k| {
        weak.tail_oscillation[k] > weak.oscillation[k] * 0.999 + 1e-12 * scale(k)
            && weak.oscillation[k] > 1e-12 * scale(k)
            && window.len() >= 4
    }) {
        Some(k) => checks.push(fail(
            weak_name,
            Witness {
                n: None,
                zero: None,
                detail: format!("coefficient {k} oscillation does not shrink over the window"),
            },
        )),
        None => checks.push(pass(weak_name)),
    }

    let needs_zeros = !matches!(theorem, TheoremId::T1_2) || nonreal_bound.is_some();
    let zeros: BTreeMap<usize, Vec<Root>> = if needs_zeros {
        let list: Vec<&Member> = members.values().collect();
        par_map(&list, |m| Ok((m.n, zeros_of(m)?)))?.into_iter().collect()
    } else {
        BTreeMap::new()
    };

    match theorem {
        TheoremId::T1_1 => {
            checks.push(zeros_confined(
                "zeros in closed upper half plane",
                &zeros,
                &Region::UpperHalfPlane,
                params.tol,
            ));
            report.diagnostics.push(gauss_lucas(&members, params.tol)?);
        }
        TheoremId::T1_2 => {
            let name = "real coefficients";
            checks.push(match members.values().find(|m| !m.poly.is_real(1e-12)) {
                Some(m) => fail(
                    name,
                    Witness {
                        n: Some(m.n),
                        zero: None,
                        detail: "member has non-real coefficients".into(),
                    },
                ),
                None => pass(name),
            });
            let bound = nonreal_bound.unwrap_or(0);
            let name = "bounded non-real zero count";
            let nonreal = Region::RealLine.complement();
            let offender = zeros.iter().find_map(|(&n, roots)| {
                let count: usize = roots
                    .iter()
                    .filter(|r| nonreal.contains(r.z, params.tol))
                    .map(|r| r.multiplicity)
                    .sum();
                (count > bound).then_some((n, count))
            });
            checks.push(match offender {
                Some((n, count)) => fail(
                    name,
                    Witness {
                        n: Some(n),
                        zero: None,
                        detail: format!("{count} non-real zeros exceed the bound {bound}"),
                    },
                ),
                None => pass(name),
            });
        }
        TheoremId::T2_3 | TheoremId::T2_4 => {
            let name = "member constant term nonzero";
            checks.push(match members.values().find(|m| m.poly.coeff(0).norm() == 0.0) {
                Some(m) => fail(
                    name,
                    Witness {
                        n: Some(m.n),
                        zero: None,
                        detail: "f_n(0) = 0".into(),
                    },
                ),
                None => pass(name),
            });
            let name = "limit constant term nonzero";
            let a0 = weak.limit_coeffs[0];
            checks.push(if a0[0].hypot(a0[1]) > params.eps {
                pass(name)
            } else {
                fail(
                    name,
                    Witness {
                        n: None,
                        zero: None,
                        detail: format!("estimated lim f_n(0) = {}{:+}i", a0[0], a0[1]),
                    },
                )
            });
            if theorem == TheoremId::T2_3 {
                let bound = m_bound.unwrap_or(f64::INFINITY);
                let name = "bounded s~_p";
                let mut offender = None;
                for (&n, roots) in &zeros {
                    let sums = match power_sums_from_roots(&as_root_set(roots), params.p as usize, &Region::Plane) {
                        Ok(t) => t.s_tilde(params.p as usize).unwrap_or(0.0),
                        Err(_) => f64::INFINITY,
                    };
                    if sums > bound {
                        offender = Some((n, sums));
                        break;
                    }
                }
                checks.push(match offender {
                    Some((n, value)) => fail(
                        name,
                        Witness {
                            n: Some(n),
                            zero: None,
                            detail: format!("s~_{} = {value} exceeds M = {bound}", params.p),
                        },
                    ),
                    None => pass(name),
                });
            } else {
                let region = Region::SectorRoot {
                    c: f64::INFINITY,
                    p: params.p,
                };
                checks.push(zeros_confined("zeros in S_inf^{1/p}", &zeros, &region, params.tol));
                report.diagnostics.push(sector_diagnostic(&zeros, params.p));
            }
        }
    }

    report.weak = Some(weak);
    report.hypothesis_checks = checks;
    if let Some(failed) = report.hypothesis_checks.iter().find(|h| !h.passed) {
        let hypothesis = failed.name.clone();
        let witness = failed.witness.clone().expect("failed checks carry a witness");
        return Err(ConvergenceError::HypothesisViolated {
            hypothesis,
            witness,
            report: Box::new(report),
        });
    }

    let strong = strong_from_members(&members, &params.radii, params.samples, &params.pairs)?;
    report.decay = params
        .radii
        .iter()
        .map(|&radius| {
            let sups = strong.sups_at(radius);
            let ratios: Vec<f64> = sups.windows(2).map(|w| w[1] / w[0]).collect();
            let monotone = sups.windows(2).all(|w| w[1] < w[0]);
            DecayRatios {
                radius,
                ratios,
                monotone,
            }
        })
        .collect();
    report.conclusion_holds = Some(report.decay.iter().all(|d| d.monotone));
    report.strong = Some(strong);
    Ok(report)
}

/// Zeros of `f_n'` for small members whose zeros lie in the upper half plane.
fn gauss_lucas(members: &BTreeMap<usize, Member>, tol: f64) -> Result<HypothesisCheck, ConvergenceError> {
    let name = "Gauss-Lucas: derivative zeros in closed upper half plane";
    for m in members.values() {
        let degree = m.poly.degree().unwrap_or(0);
        if !(2..=GAUSS_LUCAS_MAX_DEGREE).contains(&degree) {
            continue;
        }
        let roots = find_roots_default(&m.poly.derivative(1))?;
        if let Some(r) = roots.roots.iter().find(|r| !Region::UpperHalfPlane.contains(r.z, tol)) {
            return Ok(fail(
                name,
                zero_witness(m.n, r.z, "derivative zero below the real axis"),
            ));
        }
    }
    Ok(pass(name))
}

/// The sector sum inequalities at `c = 2` on every checked member.
fn sector_diagnostic(zeros: &BTreeMap<usize, Vec<Root>>, p: u32) -> HypothesisCheck {
    let name = "sector sum inequalities (c = 2)";
    for (&n, roots) in zeros {
        match sector_sum_inequalities(&as_root_set(roots), 2.0, p) {
            Ok(r) if r.violations.is_empty() => {}
            Ok(r) => {
                return fail(
                    name,
                    Witness {
                        n: Some(n),
                        zero: None,
                        detail: r.violations.join("; "),
                    },
                )
            }
            Err(e) => {
                return fail(
                    name,
                    Witness {
                        n: Some(n),
                        zero: None,
                        detail: e.to_string(),
                    },
                )
            }
        }
    }
    pass(name)
}

/// Log-log plot of sup error against the first index of each pair, one
/// polyline per radius.
pub fn plot_svg(report: &ConvergenceReport) -> Option<String> {
    let strong = report.strong.as_ref()?;
    let points: Vec<(f64, f64, f64)> = strong
        .entries
        .iter()
        .filter(|e| e.sup > 0.0)
        .map(|e| (e.radius, (e.n.min(e.m) as f64).log10(), e.sup.log10()))
        .collect();
    if points.is_empty() {
        return None;
    }
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let bounds = |f: fn(&(f64, f64, f64)) -> f64| {
        let lo = points.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = bounds(|p| p.1);
    let (y0, y1) = bounds(|p| p.2);
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <line x1=\"{pad}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{cx}\" y=\"{ty}\" text-anchor=\"middle\" font-size=\"12\">log10 n</text>\n\
         <text x=\"12\" y=\"{cy}\" font-size=\"12\" transform=\"rotate(-90 12 {cy})\">log10 sup error</text>\n",
        b = h - pad,
        r = w - pad,
        cx = w / 2.0,
        ty = h - 12.0,
        cy = h / 2.0,
    );
    let mut radii: Vec<f64> = points.iter().map(|p| p.0).collect();
    radii.dedup();
    for (i, &radius) in radii.iter().enumerate() {
        let color = colors[i % colors.len()];
        let line: Vec<String> = points
            .iter()
            .filter(|p| p.0 == radius)
            .map(|p| format!("{:.2},{:.2}", sx(p.1), sy(p.2)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            line.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"{color}\">r = {radius}</text>\n",
            w - pad - 60.0,
            pad + 16.0 * i as f64
        ));
    }
    svg.push_str("</svg>\n");
    Some(svg)
}

/// Polar angle range used by `h-random` zeros.
pub const H_RANDOM_ANGLES: (f64, f64) = (FRAC_PI_4, 3.0 * FRAC_PI_4);

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(id: &str) -> PolySequence {
        builtin_sequence(id, GenParams::default()).unwrap()
    }

    fn coeffs_close(p: &Polynomial, expected: &[f64]) {
        let q = Polynomial::from_real(expected).unwrap();
        assert_eq!(p.coeffs().len(), q.coeffs().len(), "{p}");
        for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
            assert!((a - b).norm() < 1e-14, "{p}");
        }
    }

    #[test]
    fn builtin_examples() {
        coeffs_close(&seq("binom").member(2).unwrap().poly, &[1.0, 1.0, 0.25]);
        assert_eq!(seq("monomial").member(3).unwrap().poly, Polynomial::monomial(3));
        coeffs_close(&seq("jensen-of-cos").member(2).unwrap().poly, &[1.0, 0.0, -0.25]);
        assert!(matches!(
            builtin_sequence("nope", GenParams::default()),
            Err(ConvergenceError::UnknownGenerator(_))
        ));
        let odd = GenParams {
            k: 3,
            ..GenParams::default()
        };
        assert!(builtin_sequence("real-with-k-nonreal", odd).is_err());
    }

    #[test]
    fn generators_are_deterministic_and_prefix_stable() {
        let a = seq("h-random").member(20).unwrap();
        let b = seq("h-random").member(20).unwrap();
        assert_eq!(a, b);
        let short = seq("h-random").member(10).unwrap();
        assert_eq!(short.known_zeros.unwrap()[..], a.known_zeros.as_ref().unwrap()[..10]);
        let other = builtin_sequence(
            "h-random",
            GenParams {
                seed: 7,
                ..GenParams::default()
            },
        )
        .unwrap();
        assert_ne!(other.member(20).unwrap(), a);
        for r in a.known_zeros.unwrap() {
            let arg = r.z.arg();
            assert!(arg >= H_RANDOM_ANGLES.0 && arg <= H_RANDOM_ANGLES.1);
            let scale: f64 = a
                .poly
                .coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| c.norm() * r.z.norm().powi(k as i32))
                .sum();
            assert!(a.poly.evaluate(r.z).norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn known_zeros_match_polynomials() {
        for id in ["sector-random", "real-with-k-nonreal"] {
            let m = seq(id).member(12).unwrap();
            let total: usize = m.known_zeros.as_ref().unwrap().iter().map(|r| r.multiplicity).sum();
            assert_eq!(Some(total), m.poly.degree(), "{id}");
            for r in m.known_zeros.unwrap() {
                let scale: f64 = m
                    .poly
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.norm() * r.z.norm().powi(k as i32))
                    .sum();
                assert!(m.poly.evaluate(r.z).norm() <= 1e-9 * scale, "{id}: {}", r.z);
            }
        }
    }

    #[test]
    fn weak_probe_examples() {
        let r = weak_convergence_probe(&seq("monomial"), 8, &[16, 32, 64, 128], DEFAULT_EPS).unwrap();
        assert!(r.weak.unwrap().degenerate);

        let r = weak_convergence_probe(
            &seq("jensen-of-exp"),
            6,
            &seq("jensen-of-exp").default_window(),
            DEFAULT_EPS,
        )
        .unwrap();
        let weak = r.weak.unwrap();
        assert!(!weak.degenerate);
        let mut fact = 1.0;
        for k in 0..=6 {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((weak.limit_coeffs[k][0] - 1.0 / fact).abs() < 0.02, "k = {k}");
        }

        let p = Polynomial::from_real(&[1.0, 2.0, 3.0]).unwrap();
        let constant = PolySequence::from_members(vec![p; 8]).unwrap();
        let r = weak_convergence_probe(&constant, 4, &[1, 2, 3, 8], DEFAULT_EPS).unwrap();
        assert!(r.weak.unwrap().oscillation.iter().all(|&o| o == 0.0));
        assert!(weak_convergence_probe(&constant, 4, &[1, 9], DEFAULT_EPS).is_err());
    }

    #[test]
    fn strong_probe_examples() {
        let s = seq("jensen-of-exp");
        let r = strong_convergence_probe(&s, &[2.0], 256, &[(32, 64), (128, 256)]).unwrap();
        let sups = r.strong.unwrap().sups_at(2.0);
        assert!(sups[0] / sups[1] >= 1.8, "{sups:?}");

        let p = Polynomial::from_real(&[1.0, 2.0]).unwrap();
        let constant = PolySequence::from_members(vec![p; 4]).unwrap();
        let r = strong_convergence_probe(&constant, &[1.0, 3.0], 64, &[(1, 2), (2, 4)]).unwrap();
        assert!(r.strong.unwrap().entries.iter().all(|e| e.sup == 0.0));

        let r = strong_convergence_probe(&seq("monomial"), &[2.0], 64, &[(4, 8), (8, 16)]).unwrap();
        let sups = r.strong.unwrap().sups_at(2.0);
        assert!(sups[1] > sups[0]);
        assert!(strong_convergence_probe(&constant, &[1.0], 10, &[(1, 2)]).is_err());
    }

    #[test]
    fn derivative_sequence_shifts_coefficients() {
        let s = seq("h-random");
        let d = s.derivative(2);
        let (f, g) = (s.member(20).unwrap().poly, d.member(20).unwrap().poly);
        for k in 0..10 {
            let expected = f.coeff(k + 2) * ((k + 1) * (k + 2)) as f64;
            assert!((g.coeff(k) - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
        }
    }

    #[test]
    fn theorem_harness_examples() {
        let r = validate_theorem(&seq("jensen-of-exp"), TheoremId::T1_1, &TheoremParams::default()).unwrap();
        assert!(r.failed_hypotheses().is_empty());
        assert_eq!(r.conclusion_holds, Some(true));

        match validate_theorem(&seq("monomial"), TheoremId::T1_1, &TheoremParams::default()) {
            Err(ConvergenceError::HypothesisViolated { hypothesis, report, .. }) => {
                assert_eq!(hypothesis, "nonzero limit coefficient");
                assert_eq!(report.failed_hypotheses(), vec!["nonzero limit coefficient"]);
                assert!(report.strong.is_none());
            }
            other => panic!("unexpected {other:?}"),
        }

        let params = TheoremParams {
            nonreal_bound: Some(2),
            ..TheoremParams::default()
        };
        let r = validate_theorem(&seq("real-with-k-nonreal"), TheoremId::T1_2, &params).unwrap();
        assert_eq!(r.conclusion_holds, Some(true));
        let tight = TheoremParams {
            nonreal_bound: Some(1),
            ..TheoremParams::default()
        };
        assert!(validate_theorem(&seq("real-with-k-nonreal"), TheoremId::T1_2, &tight).is_err());
    }

    #[test]
    fn sector_theorems() {
        let params = TheoremParams {
            m_bound: Some(2.0),
            ..TheoremParams::default()
        };
        let r = validate_theorem(&seq("sector-random"), TheoremId::T2_3, &params).unwrap();
        assert_eq!(r.conclusion_holds, Some(true));
        let r = validate_theorem(&seq("sector-random"), TheoremId::T2_4, &TheoremParams::default()).unwrap();
        assert!(r.diagnostics.iter().all(|d| d.passed));
        // zeros of h-random stray outside the right half plane
        assert!(validate_theorem(&seq("h-random"), TheoremId::T2_4, &TheoremParams::default()).is_err());
    }

    #[test]
    fn svg_plot_is_deterministic() {
        let r = strong_convergence_probe(&seq("binom"), &[1.0, 2.0], 64, &[(16, 32), (32, 64)]).unwrap();
        let a = plot_svg(&r).unwrap();
        assert_eq!(a, plot_svg(&r).unwrap());
        assert!(a.starts_with("<svg"));
        assert_eq!(a.matches("<polyline").count(), 2);
    }
}
