//! Dense complex polynomials in ascending coefficient order.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::PowerSeries;

/// The scalar field every module works over.
pub type Complex = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("coefficient {index} is not finite ({value})")]
    NonFinite { index: usize, value: Complex },
    #[error("leading factor must be nonzero")]
    ZeroLeading,
    #[error("constant term is zero")]
    ConstantTermZero,
}

pub(crate) fn is_finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub(crate) fn check_finite(coeffs: &[Complex]) -> Result<(), PolyError> {
    match coeffs.iter().position(|c| !is_finite(*c)) {
        Some(index) => Err(PolyError::NonFinite {
            index,
            value: coeffs[index],
        }),
        None => Ok(()),
    }
}

/// A polynomial `c_0 + c_1 z + ... + c_d z^d`.
///
/// The coefficient vector never ends in an exact zero, so the empty vector is
/// the zero polynomial and `coeffs.len() - 1` is the degree otherwise.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "crate::io::CoeffFile", into = "crate::io::CoeffFile")]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl Polynomial {
    /// Builds a polynomial, rejecting NaN/Inf coefficients.
    pub fn new(coeffs: Vec<Complex>) -> Result<Self, PolyError> {
        check_finite(&coeffs)?;
        Ok(Self::from_vec(coeffs))
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self, PolyError> {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    /// Internal constructor for coefficient vectors produced by finite arithmetic.
    pub(crate) fn from_vec(mut coeffs: Vec<Complex>) -> Self {
        while coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex) -> Self {
        Self::from_vec(vec![c])
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![Complex::new(0.0, 0.0); k + 1];
        coeffs[k] = Complex::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex> {
        self.coeffs
    }

    /// Coefficient of `z^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Complex> {
        self.coeffs.last().copied()
    }

    /// Largest coefficient modulus, 0 for the zero polynomial.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// True when every imaginary part is at most `tol * max|c_k|` in modulus.
    pub fn is_real(&self, tol: f64) -> bool {
        let bound = tol * self.max_abs_coeff();
        self.coeffs.iter().all(|c| c.im.abs() <= bound)
    }

    /// Drops leading coefficients below `rel * max|c_k|`.
    pub fn trim_relative(&self, rel: f64) -> Self {
        let bound = rel * self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= bound) {
            coeffs.pop();
        }
        Self::from_vec(coeffs)
    }

    /// Horner evaluation.
    pub fn evaluate(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn evaluate_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// k-th formal derivative.
    pub fn derivative(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        if k >= self.coeffs.len() {
            return Self::zero();
        }
        let coeffs = (k..self.coeffs.len())
            .map(|j| {
                // j!/(j-k)! as a product of integers
                let falling: f64 = ((j - k + 1)..=j).map(|i| i as f64).product();
                self.coeffs[j] * falling
            })
            .collect();
        Self::from_vec(coeffs)
    }

    /// `q(z) = p(z + t)` by repeated synthetic division.
    pub fn shift_argument(&self, t: Complex) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        if t == Complex::new(0.0, 0.0) {
            return self.clone();
        }
        // After pass i, c[i] holds the i-th Taylor coefficient at t.
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let carry = c[j + 1] * t;
                c[j] += carry;
            }
        }
        Self::from_vec(c)
    }

    /// `q(z) = p(lambda z)`.
    pub fn scale_argument(&self, lambda: Complex) -> Self {
        let mut power = Complex::new(1.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                let out = c * power;
                power *= lambda;
                out
            })
            .collect();
        Self::from_vec(coeffs)
    }

    /// `leading * prod (z - r)` by iterative convolution.
    pub fn from_roots(roots: &[Complex], leading: Complex) -> Result<Self, PolyError> {
        if leading == Complex::new(0.0, 0.0) {
            return Err(PolyError::ZeroLeading);
        }
        check_finite(roots)?;
        check_finite(&[leading])?;
        let mut coeffs = vec![Complex::new(1.0, 0.0)];
        for &r in roots {
            coeffs.push(Complex::new(0.0, 0.0));
            for j in (1..coeffs.len()).rev() {
                let lower = coeffs[j - 1];
                coeffs[j] = lower - r * coeffs[j];
            }
            coeffs[0] = -r * coeffs[0];
        }
        Ok(Self::from_vec(coeffs.into_iter().map(|c| c * leading).collect()))
    }

    /// Truncated Maclaurin series of `p'/p` through `z^order`.
    pub fn log_derivative_series(&self, order: usize) -> Result<PowerSeries, PolyError> {
        let p0 = self.coeff(0);
        if p0.norm() == 0.0 {
            return Err(PolyError::ConstantTermZero);
        }
        let dp = self.derivative(1);
        let mut q: Vec<Complex> = Vec::with_capacity(order + 1);
        for j in 0..=order {
            let mut acc = dp.coeff(j);
            for i in 1..=j.min(self.coeffs.len().saturating_sub(1)) {
                acc -= self.coeffs[i] * q[j - i];
            }
            q.push(acc / p0);
        }
        Ok(PowerSeries::from_vec(q))
    }

    /// First `count` Taylor coefficients of `p` about `c`, i.e. `p^{(j)}(c)/j!`.
    pub fn taylor_coeffs_at(&self, c: Complex, count: usize) -> Vec<Complex> {
        taylor_prefix(&self.coeffs, c, count)
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self::from_vec(self.coeffs.iter().map(|&c| c * factor).collect())
    }

    /// Coefficient reversal `z^n p(1/z)` for a given `n >= deg p`.
    pub fn reversed(&self, n: usize) -> Self {
        let mut coeffs = vec![Complex::new(0.0, 0.0); n + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[n - k] = c;
        }
        Self::from_vec(coeffs)
    }
}

/// Repeated synthetic division; stops after `count` coefficients.
pub(crate) fn taylor_prefix<T>(coeffs: &[T], c: T, count: usize) -> Vec<T>
where
    T: Copy + std::ops::AddAssign + std::ops::Mul<Output = T>,
{
    let mut work = coeffs.to_vec();
    let n = work.len();
    let count = count.min(n);
    for i in 0..count {
        for j in (i..n - 1).rev() {
            let carry = work[j + 1] * c;
            work[j] += carry;
        }
    }
    work.truncate(count);
    work
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

fn zip_coeffs(a: &[Complex], b: &[Complex], op: impl Fn(Complex, Complex) -> Complex) -> Vec<Complex> {
    let zero = Complex::new(0.0, 0.0);
    (0..a.len().max(b.len()))
        .map(|k| op(*a.get(k).unwrap_or(&zero), *b.get(k).unwrap_or(&zero)))
        .collect()
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::from_vec(zip_coeffs(&self.coeffs, &rhs.coeffs, |x, y| x + y))
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::from_vec(zip_coeffs(&self.coeffs, &rhs.coeffs, |x, y| x - y))
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::from_vec(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::from_vec(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn close(a: &Polynomial, b: &Polynomial, tol: f64) -> bool {
        let n = a.coeffs().len().max(b.coeffs().len());
        (0..n).all(|k| (a.coeff(k) - b.coeff(k)).norm() <= tol)
    }

    #[test]
    fn evaluate_examples() {
        let p = Polynomial::from_real(&[1.0, 0.0, 1.0]).unwrap();
        assert!(p.evaluate(c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(Polynomial::zero().evaluate(c(5.0, 0.0)), c(0.0, 0.0));
        let q = Polynomial::from_real(&[1.0, -1.5, 0.5]).unwrap();
        assert!(q.evaluate(c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let cube = Polynomial::monomial(3);
        assert_eq!(cube.derivative(1), Polynomial::from_real(&[0.0, 0.0, 3.0]).unwrap());
        let p = Polynomial::from_real(&[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(p.derivative(2), Polynomial::from_real(&[2.0]).unwrap());
        assert!(Polynomial::constant(c(4.0, 1.0)).derivative(1).is_zero());
        assert!(cube.derivative(7).is_zero());
    }

    #[test]
    fn shift_examples() {
        let sq = Polynomial::monomial(2);
        assert_eq!(
            sq.shift_argument(c(1.0, 0.0)),
            Polynomial::from_real(&[1.0, 2.0, 1.0]).unwrap()
        );
        let p = Polynomial::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let expected = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 2.0), c(1.0, 0.0)]).unwrap();
        assert!(close(&p.shift_argument(c(0.0, 1.0)), &expected, 1e-15));
        assert_eq!(p.shift_argument(c(0.0, 0.0)), p);
    }

    #[test]
    fn scale_examples() {
        let p = Polynomial::from_real(&[1.0, 1.0]).unwrap();
        assert_eq!(
            p.scale_argument(c(0.5, 0.0)),
            Polynomial::from_real(&[1.0, 0.5]).unwrap()
        );
        let sq = Polynomial::monomial(2);
        assert!(close(
            &sq.scale_argument(c(0.0, 1.0)),
            &Polynomial::from_real(&[0.0, 0.0, -1.0]).unwrap(),
            0.0
        ));
        assert_eq!(p.scale_argument(c(1.0, 0.0)), p);
        let q = Polynomial::from_real(&[3.0, 2.0, 5.0]).unwrap();
        assert_eq!(q.scale_argument(c(0.0, 0.0)), Polynomial::constant(c(3.0, 0.0)));
    }

    #[test]
    fn from_roots_examples() {
        let p = Polynomial::from_roots(&[c(0.0, 1.0), c(0.0, -1.0)], c(1.0, 0.0)).unwrap();
        assert!(close(&p, &Polynomial::from_real(&[1.0, 0.0, 1.0]).unwrap(), 1e-15));
        let q = Polynomial::from_roots(&[c(1.0, 0.0), c(2.0, 0.0)], c(0.5, 0.0)).unwrap();
        assert!(close(&q, &Polynomial::from_real(&[1.0, -1.5, 0.5]).unwrap(), 1e-15));
        let k = Polynomial::from_roots(&[], c(3.0, 0.0)).unwrap();
        assert_eq!(k, Polynomial::constant(c(3.0, 0.0)));
        assert_eq!(
            Polynomial::from_roots(&[c(1.0, 0.0)], c(0.0, 0.0)),
            Err(PolyError::ZeroLeading)
        );
    }

    #[test]
    fn log_derivative_examples() {
        let p = Polynomial::from_real(&[1.0, -1.0]).unwrap();
        let s = p.log_derivative_series(2).unwrap();
        assert_eq!(s.coeffs(), &[c(-1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)]);
        let one = Polynomial::constant(c(1.0, 0.0));
        assert!(one
            .log_derivative_series(3)
            .unwrap()
            .coeffs()
            .iter()
            .all(|z| z.norm() == 0.0));
        let q = Polynomial::from_real(&[1.0, -1.5, 0.5]).unwrap();
        assert_eq!(q.log_derivative_series(1).unwrap().coeff(0), c(-1.5, 0.0));
        assert_eq!(
            Polynomial::from_real(&[0.0, 1.0]).unwrap().log_derivative_series(2),
            Err(PolyError::ConstantTermZero)
        );
    }

    #[test]
    fn construction_trims_exact_zeros_and_rejects_nan() {
        let p = Polynomial::from_real(&[1.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.degree(), Some(1));
        assert!(Polynomial::from_real(&[]).unwrap().is_zero());
        assert!(matches!(
            Polynomial::from_real(&[1.0, f64::NAN]),
            Err(PolyError::NonFinite { index: 1, .. })
        ));
        let t = Polynomial::from_real(&[1.0, 2.0, 1e-20]).unwrap().trim_relative(1e-14);
        assert_eq!(t.degree(), Some(1));
    }

    #[test]
    fn taylor_prefix_matches_derivatives() {
        let p = Polynomial::from_real(&[2.0, -1.0, 3.0, 0.5]).unwrap();
        let at = c(0.7, -0.2);
        let t = p.taylor_coeffs_at(at, 4);
        let mut fact = 1.0;
        for (j, tj) in t.iter().enumerate() {
            if j > 0 {
                fact *= j as f64;
            }
            let expected = p.derivative(j).evaluate(at) / fact;
            assert!((tj - expected).norm() < 1e-13);
        }
    }
}
