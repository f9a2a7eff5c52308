//! Exact arithmetic at a fixed rational `q`: q-integers, q-factorials and
//! Gaussian binomials, plus the approximate scalars used where square roots
//! are unavoidable.

pub mod approx;
mod rational;

pub use approx::{Cplx, Real};
pub use rational::QScalar;

use crate::error::{Error, Result};

pub(crate) fn require_positive(q: &QScalar) -> Result<()> {
    if q.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "q must be positive, got {}",
            q.pretty()
        )))
    }
}

pub(crate) fn require_generic(q: &QScalar) -> Result<()> {
    require_positive(q)?;
    if q.is_one() {
        return Err(Error::UnsupportedParameter(
            "q = 1 is the classical limit; use the integer n directly".into(),
        ));
    }
    Ok(())
}

/// The symmetric q-integer `[n]_q = (q^n - q^-n) / (q - q^-1)`.
pub fn q_int(n: i64, q: &QScalar) -> Result<QScalar> {
    require_generic(q)?;
    Ok(q_int_unchecked(n, q))
}

/// `[n]_q`, continued to `n` at `q = 1`. Callers guarantee `q > 0`.
pub(crate) fn q_int_unchecked(n: i64, q: &QScalar) -> QScalar {
    if q.is_one() {
        return QScalar::from_integer(n);
    }
    let num = &q.pow(n) - &q.pow(-n);
    let den = &q.pow(1) - &q.pow(-1);
    &num / &den
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`.
pub fn q_factorial(n: u32, q: &QScalar) -> Result<QScalar> {
    require_generic(q)?;
    Ok(q_factorial_unchecked(n, q))
}

fn q_factorial_unchecked(n: u32, q: &QScalar) -> QScalar {
    (1..=i64::from(n)).fold(QScalar::one(), |acc, m| acc * q_int_unchecked(m, q))
}

/// Gaussian binomial `[n choose k]_q = [n]! / ([k]! [n-k]!)`.
pub fn q_binomial(n: i64, k: i64, q: &QScalar) -> Result<QScalar> {
    require_generic(q)?;
    if n < 0 || k < 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "q-binomial needs 0 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    let (n, k) = (n as u32, k as u32);
    let num = q_factorial_unchecked(n, q);
    let den = q_factorial_unchecked(k, q) * q_factorial_unchecked(n - k, q);
    Ok(&num / &den)
}
