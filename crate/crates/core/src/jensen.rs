//! Appell and Jensen polynomials of a power series, the scaled Jensen
//! sequence and the Hermite-Poulain operator.

use thiserror::Error;

use crate::poly::{is_finite, Complex, Polynomial};
use crate::series::PowerSeries;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JensenError {
    /// `n!/(n-k)! a_k` left the double range.
    #[error("coefficient {k} of the degree-{n} polynomial overflows")]
    Overflow { n: usize, k: usize },
}

/// `n!/(n-k)! a_k` for `k = 0..=n`, built from the integer factors
/// `n, n-1, ..., n-k+1`. Missing `a_k` count as zero.
///
/// The running product is kept as `mantissa * 2^(500 e)` so that only a
/// result outside the double range is an overflow.
fn falling_coefficients(f: &PowerSeries, n: usize) -> Result<Vec<Complex>, JensenError> {
    let step = 2.0_f64.powi(500);
    let mut out = Vec::with_capacity(n + 1);
    let mut mantissa = 1.0_f64;
    let mut e = 0u32;
    for k in 0..=n {
        if k > 0 {
            mantissa *= (n - k + 1) as f64;
            if mantissa > step {
                mantissa /= step;
                e += 1;
            }
        }
        let mut c = f.coeff(k) * mantissa;
        for _ in 0..e {
            if c == Complex::new(0.0, 0.0) {
                break;
            }
            c *= step;
        }
        if !is_finite(c) {
            return Err(JensenError::Overflow { n, k });
        }
        out.push(c);
    }
    Ok(out)
}

/// `A(f,n)(z) = sum_k n!/(n-k)! a_k z^{n-k}`.
pub fn appell(f: &PowerSeries, n: usize) -> Result<Polynomial, JensenError> {
    let mut c = falling_coefficients(f, n)?;
    c.reverse();
    Ok(Polynomial::from_vec(c))
}

/// `J(f,n)(z) = sum_k n!/(n-k)! a_k z^k`.
pub fn jensen(f: &PowerSeries, n: usize) -> Result<Polynomial, JensenError> {
    Ok(Polynomial::from_vec(falling_coefficients(f, n)?))
}

/// `f*_n(z) = J(f,n)(z/n)`.
///
/// The coefficient `a_k n!/((n-k)! n^k)` is accumulated as
/// `a_k prod_{j<k} (n-j)/n`, which stays bounded where `J(f,n)` itself would
/// overflow.
pub fn jensen_sequence_member(f: &PowerSeries, n: usize) -> Result<Polynomial, JensenError> {
    assert!(n >= 1, "jensen_sequence_member needs n >= 1");
    let nf = n as f64;
    let mut factor = 1.0_f64;
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            factor *= (n - k + 1) as f64 / nf;
        }
        let c = f.coeff(k) * factor;
        if !is_finite(c) {
            return Err(JensenError::Overflow { n, k });
        }
        out.push(c);
    }
    Ok(Polynomial::from_vec(out))
}

/// `h' - b h`.
pub fn hermite_poulain(h: &Polynomial, b: Complex) -> Polynomial {
    &h.derivative(1) - &h.scale(b)
}
