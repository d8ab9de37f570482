//! Truncated formal power series `a_0 + a_1 z + ... + a_K z^K`.

use serde::{Deserialize, Serialize};

use crate::poly::{check_finite, Complex, PolyError, Polynomial};

/// Maclaurin coefficients `a_k = f^{(k)}(0)/k!` up to a fixed order.
///
/// Unlike [`Polynomial`], trailing zeros are kept: the length records the
/// truncation order, and coefficients past it read as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::io::CoeffFile", into = "crate::io::CoeffFile")]
pub struct PowerSeries {
    coeffs: Vec<Complex>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex>) -> Result<Self, PolyError> {
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self, PolyError> {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    pub(crate) fn from_vec(coeffs: Vec<Complex>) -> Self {
        Self { coeffs }
    }

    /// Series of `e^z` through `z^order`.
    pub fn exp(order: usize) -> Self {
        let mut a = Vec::with_capacity(order + 1);
        let mut term = 1.0;
        for k in 0..=order {
            if k > 0 {
                term /= k as f64;
            }
            a.push(Complex::new(term, 0.0));
        }
        Self { coeffs: a }
    }

    /// Series of `cos z` through `z^order`.
    pub fn cos(order: usize) -> Self {
        let exp = Self::exp(order);
        let coeffs = exp
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| match k % 4 {
                0 => c,
                2 => -c,
                _ => Complex::new(0.0, 0.0),
            })
            .collect();
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    /// Truncation order `K`; an empty series reports 0.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `a_k`, zero past the truncation order.
    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        let bound = tol * self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.coeffs.iter().all(|c| c.im.abs() <= bound)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// Cauchy product truncated at `min(K_self, K_other)`.
    pub fn mul_truncated(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self { coeffs: Vec::new() };
        }
        let coeffs = (0..=order)
            .map(|k| (0..=k).map(|i| self.coeff(i) * other.coeff(k - i)).sum())
            .collect();
        Self { coeffs }
    }

    /// The polynomial with the same coefficients.
    pub fn to_polynomial(&self) -> Polynomial {
        Polynomial::from_vec(self.coeffs.clone())
    }
}

impl From<&Polynomial> for PowerSeries {
    fn from(p: &Polynomial) -> Self {
        Self {
            coeffs: p.coeffs().to_vec(),
        }
    }
}
