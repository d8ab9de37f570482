//! All zeros of a polynomial, with multiplicities.
//!
//! The engine is Aberth–Ehrlich simultaneous iteration started from circles
//! read off the Newton polygon of the coefficient moduli (clamped to the
//! Cauchy annulus), followed by a short Newton polish. Raw approximations are
//! then grouped: first by plain single-linkage at radius `eps * (1 + |z|)`,
//! then by merging neighbouring groups whenever the polynomial is, to within
//! `multiplicity_tol` relative coefficient perturbation, indistinguishable
//! from one with a root of the combined multiplicity at their centroid.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{Complex, Polynomial};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_CLUSTER_EPS: f64 = 1e-6;
pub const DEFAULT_MULTIPLICITY_TOL: f64 = 1e-12;

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;
const NEWTON_POLISH_STEPS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Backward-error threshold for declaring convergence.
    pub tol: f64,
    pub max_iter: usize,
    pub cluster_eps: f64,
    /// Relative coefficient perturbation under which a group of approximations
    /// is reported as one multiple root.
    pub multiplicity_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            cluster_eps: DEFAULT_CLUSTER_EPS,
            multiplicity_tol: DEFAULT_MULTIPLICITY_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub z: Complex,
    pub multiplicity: usize,
}

/// Computed zeros of one polynomial.
///
/// `residuals[i] = |p(roots[i].z)| / max|c_k|`. `converged` is decided on the
/// componentwise backward error of every raw approximation, which stays
/// meaningful for roots far from the unit circle; see `backward_errors`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootSet {
    pub roots: Vec<Root>,
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub backward_errors: Vec<f64>,
}

impl RootSet {
    /// Sum of multiplicities.
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Every root repeated by its multiplicity.
    pub fn expanded(&self) -> Vec<Complex> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.z, r.multiplicity))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct RootWire {
    z: [f64; 2],
    mult: usize,
}

#[derive(Serialize, Deserialize)]
struct RootSetWire {
    roots: Vec<RootWire>,
    residuals: Vec<f64>,
    converged: bool,
}

impl Serialize for RootSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RootSetWire {
            roots: self
                .roots
                .iter()
                .map(|r| RootWire {
                    z: [r.z.re, r.z.im],
                    mult: r.multiplicity,
                })
                .collect(),
            residuals: self.residuals.clone(),
            converged: self.converged,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RootSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = RootSetWire::deserialize(deserializer)?;
        if wire.roots.iter().any(|r| r.mult == 0) {
            return Err(serde::de::Error::custom("multiplicity must be positive"));
        }
        Ok(RootSet {
            roots: wire
                .roots
                .into_iter()
                .map(|r| Root {
                    z: Complex::new(r.z[0], r.z[1]),
                    multiplicity: r.mult,
                })
                .collect(),
            residuals: wire.residuals,
            converged: wire.converged,
            backward_errors: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("polynomial has degree zero (or is identically zero)")]
    DegreeZero,
    #[error("root iteration did not reach the requested tolerance")]
    NoConvergence(Box<RootSet>),
}

impl RootError {
    /// Best-effort roots from a failed run.
    pub fn partial(&self) -> Option<&RootSet> {
        match self {
            RootError::NoConvergence(rs) => Some(rs),
            RootError::DegreeZero => None,
        }
    }
}

/// Roots with default options.
pub fn find_roots_default(p: &Polynomial) -> Result<RootSet, RootError> {
    find_roots(p, &RootOptions::default())
}

pub fn find_roots(p: &Polynomial, opts: &RootOptions) -> Result<RootSet, RootError> {
    let degree = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(RootError::DegreeZero),
    };
    let coeffs = p.coeffs();
    let origin = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let scale = p.max_abs_coeff();
    let reduced: Vec<Complex> = coeffs[origin..].iter().map(|c| c / scale).collect();

    let mut raw = aberth(&reduced, opts.max_iter);
    for z in raw.iter_mut() {
        *z = polish(&reduced, *z);
    }
    let mut backward_errors: Vec<f64> = raw.iter().map(|&z| ratio_and_error(&reduced, z).1).collect();
    backward_errors.extend(std::iter::repeat_n(0.0, origin));
    let converged = backward_errors.iter().all(|&e| e <= opts.tol);

    let mut groups = group_single_linkage(&raw, opts.cluster_eps);
    if origin > 0 {
        groups.push(Group {
            sum: Complex::new(0.0, 0.0),
            count: origin,
        });
    }
    let normalized: Vec<Complex> = coeffs.iter().map(|c| c / scale).collect();
    let mut roots = merge_multiple(&normalized, groups, opts.multiplicity_tol);
    sort_roots(&mut roots);
    debug_assert_eq!(roots.iter().map(|r| r.multiplicity).sum::<usize>(), degree);

    let residuals = roots.iter().map(|r| p.evaluate(r.z).norm() / scale).collect();
    let set = RootSet {
        roots,
        residuals,
        converged,
        backward_errors,
    };
    if converged {
        Ok(set)
    } else {
        Err(RootError::NoConvergence(Box::new(set)))
    }
}

/// Single-linkage grouping at radius `eps * (1 + |z|)`, reported at centroids.
pub fn cluster_roots(raw: &[Complex], eps: f64) -> Vec<Root> {
    let mut roots: Vec<Root> = group_single_linkage(raw, eps).into_iter().map(|g| g.root()).collect();
    sort_roots(&mut roots);
    roots
}

fn sort_roots(roots: &mut [Root]) {
    roots.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
}

#[derive(Debug, Clone, Copy)]
struct Group {
    sum: Complex,
    count: usize,
}

impl Group {
    fn centroid(&self) -> Complex {
        self.sum / self.count as f64
    }

    fn root(&self) -> Root {
        Root {
            z: self.centroid(),
            multiplicity: self.count,
        }
    }
}

fn group_single_linkage(raw: &[Complex], eps: f64) -> Vec<Group> {
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let radius = eps * (1.0 + raw[i].norm().max(raw[j].norm()));
            if (raw[i] - raw[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<Option<Group>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        let g = groups[r].get_or_insert(Group {
            sum: Complex::new(0.0, 0.0),
            count: 0,
        });
        g.sum += raw[i];
        g.count += 1;
    }
    groups.into_iter().flatten().collect()
}

/// Newton-polygon starting points.
fn initial_guesses(q: &[Complex]) -> Vec<Complex> {
    let n = q.len() - 1;
    let moduli: Vec<f64> = q.iter().map(|c| c.norm()).collect();
    let lead = moduli[n];
    let upper = 1.0 + moduli[..n].iter().fold(0.0_f64, |m, &a| m.max(a / lead));
    let tail_max = moduli[1..].iter().fold(0.0_f64, |m, &a| m.max(a));
    let lower = moduli[0] / (moduli[0] + tail_max);

    // upper convex hull of (k, log|q_k|) over nonzero coefficients
    let points: Vec<(usize, f64)> = moduli
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(k, &m)| (k, m.ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let mut guesses = Vec::with_capacity(n);
    for (edge, w) in hull.windows(2).enumerate() {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let count = j - i;
        let radius = ((li - lj) / count as f64).exp().clamp(lower, upper);
        let phase = 0.4 + edge as f64 * GOLDEN_ANGLE;
        for t in 0..count {
            let theta = phase + 2.0 * PI * t as f64 / count as f64;
            guesses.push(Complex::from_polar(radius, theta));
        }
    }
    guesses
}

/// Newton ratio `p(z)/p'(z)` and componentwise backward error at `z`.
///
/// Outside the unit disk the reversed polynomial is evaluated at `1/z` so
/// nothing overflows for large roots.
fn ratio_and_error(q: &[Complex], z: Complex) -> (Complex, f64) {
    let n = q.len() - 1;
    let zero = Complex::new(0.0, 0.0);
    if z.norm() <= 1.0 {
        let (mut p, mut dp, mut s) = (zero, zero, 0.0);
        let r = z.norm();
        for &c in q.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
            s = s * r + c.norm();
        }
        (p / dp, p.norm() / s)
    } else {
        let w = z.inv();
        let r = w.norm();
        let (mut p, mut dp, mut s) = (zero, zero, 0.0);
        for &c in q.iter() {
            dp = dp * w + p;
            p = p * w + c;
            s = s * r + c.norm();
        }
        (z / (n as f64 - w * dp / p), p.norm() / s)
    }
}

fn aberth(q: &[Complex], max_iter: usize) -> Vec<Complex> {
    let n = q.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![-q[0] / q[1]];
    }
    let noise = 4.0 * f64::EPSILON * n as f64;
    let mut z = initial_guesses(q);
    let mut done = vec![false; n];
    for _ in 0..max_iter {
        let mut finished = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, err) = ratio_and_error(q, z[i]);
            if err <= noise {
                done[i] = true;
                continue;
            }
            if !ratio.re.is_finite() || !ratio.im.is_finite() {
                // stationary point of p: nudge off it
                let nudge = Complex::from_polar(1e-7 * (1.0 + z[i].norm()), GOLDEN_ANGLE * (i + 1) as f64);
                z[i] += nudge;
                finished = false;
                continue;
            }
            let repulsion: Complex = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                if step.norm() <= 2.0 * f64::EPSILON * z[i].norm() {
                    done[i] = true;
                }
            }
            finished &= done[i];
        }
        if finished {
            break;
        }
    }
    z
}

fn polish(q: &[Complex], mut z: Complex) -> Complex {
    let (mut ratio, mut err) = ratio_and_error(q, z);
    for _ in 0..NEWTON_POLISH_STEPS {
        if err == 0.0 || !ratio.re.is_finite() || !ratio.im.is_finite() {
            break;
        }
        let candidate = z - ratio;
        let (next_ratio, next_err) = ratio_and_error(q, candidate);
        if next_err < err {
            z = candidate;
            ratio = next_ratio;
            err = next_err;
        } else {
            break;
        }
    }
    z
}

/// Taylor coefficients `t_0..t_{count-1}` at `c` of the polynomial in
/// `u = z/s`, `s = max(1, |c|)`, divided by `s^n` so nothing overflows,
/// with the matching sums of moduli.
fn scaled_taylor(coeffs: &[Complex], c: Complex, count: usize) -> (Vec<Complex>, Vec<f64>, f64) {
    let n = coeffs.len() - 1;
    let s = c.norm().max(1.0);
    let mut b: Vec<Complex> = coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| a * s.powi(k as i32 - n as i32))
        .collect();
    let mut babs: Vec<f64> = b.iter().map(|x| x.norm()).collect();
    let u0 = c / s;
    let r0 = u0.norm();
    let count = count.min(n + 1);
    for i in 0..count {
        for j in (i..n).rev() {
            let carry = b[j + 1] * u0;
            b[j] += carry;
            babs[j] += babs[j + 1] * r0;
        }
    }
    b.truncate(count);
    babs.truncate(count);
    (b, babs, s)
}

/// True when `c` is a root of multiplicity `m` of some polynomial whose
/// coefficients differ from `coeffs` by at most `eta` relatively, judged per
/// Taylor coefficient at `c` against the matching sum of moduli.
fn is_multiple_root(coeffs: &[Complex], c: Complex, m: usize, eta: f64) -> bool {
    let (t, tabs, _) = scaled_taylor(coeffs, c, m);
    t.iter().zip(&tabs).all(|(t, s)| t.norm() <= eta * s)
}

/// Newton iteration on the `(m-1)`-th derivative, whose zero near a cluster
/// of `m` computed roots is simple.
fn refine_center(coeffs: &[Complex], mut c: Complex, m: usize) -> Complex {
    if m < 2 || m >= coeffs.len() {
        return c;
    }
    let mut last = f64::INFINITY;
    for _ in 0..8 {
        let (t, _, s) = scaled_taylor(coeffs, c, m + 1);
        let size = t[m - 1].norm();
        if size.is_nan() || size >= last || t[m].norm() == 0.0 {
            break;
        }
        last = size;
        let step = t[m - 1] / (t[m] * m as f64) * s;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        c -= step;
        if step.norm() <= f64::EPSILON * c.norm() {
            break;
        }
    }
    c
}

/// Most neighbours tried when growing a cluster around one group.
const MAX_CLUSTER_GROWTH: usize = 128;

/// Every member is closer to `centroid` than the next candidate, so the
/// union is a separated cluster worth validating.
fn is_isolated(points: &[Complex], next: Option<Complex>, centroid: Complex) -> bool {
    let spread = points.iter().map(|p| (p - centroid).norm()).fold(0.0, f64::max);
    next.is_none_or(|q| (q - centroid).norm() > spread)
}

/// Grows a cluster around each group by adding its nearest neighbours one at
/// a time, and keeps the largest cluster that validates as a multiple root.
fn merge_multiple(coeffs: &[Complex], mut groups: Vec<Group>, eta: f64) -> Vec<Root> {
    groups.sort_by(|a, b| {
        let (x, y) = (a.centroid(), b.centroid());
        x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
    });
    let mut alive = vec![true; groups.len()];
    for g in 0..groups.len() {
        if !alive[g] {
            continue;
        }
        let seed = groups[g].centroid();
        let reach = 0.5 * (1.0 + seed.norm());
        let mut neighbours: Vec<(f64, usize)> = (0..groups.len())
            .filter(|&h| h != g && alive[h])
            .map(|h| ((groups[h].centroid() - seed).norm(), h))
            .filter(|&(d, _)| d <= reach)
            .collect();
        neighbours.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        neighbours.truncate(MAX_CLUSTER_GROWTH);

        let mut union = groups[g];
        let mut points = vec![seed];
        let mut best = None;
        for (taken, &(_, h)) in neighbours.iter().enumerate() {
            union.sum += groups[h].sum;
            union.count += groups[h].count;
            points.push(groups[h].centroid());
            let centroid = union.centroid();
            let next = neighbours.get(taken + 1).map(|&(_, k)| groups[k].centroid());
            if !is_isolated(&points, next, centroid) {
                continue;
            }
            let center = refine_center(coeffs, centroid, union.count);
            if (center - centroid).norm() <= reach && is_multiple_root(coeffs, center, union.count, eta) {
                best = Some((taken, center, union.count));
            }
        }
        if let Some((taken, center, count)) = best {
            for &(_, k) in &neighbours[..=taken] {
                alive[k] = false;
            }
            groups[g] = Group {
                sum: center * count as f64,
                count,
            };
        }
    }
    groups
        .into_iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|(g, _)| g.root())
        .collect()
}
