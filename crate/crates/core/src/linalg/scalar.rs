use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::Mat;
use crate::qnum::approx::INTERNAL_TOL;
use crate::qnum::{Cplx, QScalar, Real};

/// Size of a residual: exact (`max |entry|`) for rational matrices,
/// Frobenius norm for approximate ones.
#[derive(Debug, Clone)]
pub enum Residual {
    Exact(QScalar),
    Approx(f64),
}

impl Residual {
    /// A residual of size one, used to flag a failed yes/no check.
    pub fn flag(exact: bool, ok: bool) -> Residual {
        match (exact, ok) {
            (true, true) => Residual::Exact(QScalar::zero()),
            (true, false) => Residual::Exact(QScalar::one()),
            (false, true) => Residual::Approx(0.0),
            (false, false) => Residual::Approx(1.0),
        }
    }

    /// Larger of two residuals of the same kind.
    pub fn max(self, other: Residual) -> Residual {
        match (self, other) {
            (Residual::Exact(a), Residual::Exact(b)) => Residual::Exact(a.max(b)),
            (a, b) => {
                if b.to_f64() > a.to_f64() {
                    b
                } else {
                    a
                }
            }
        }
    }

    /// Exact residuals pass only at zero; approximate ones at `<= tol`.
    pub fn passes(&self, tol: f64) -> bool {
        match self {
            Residual::Exact(q) => q.is_zero(),
            Residual::Approx(x) => *x <= tol,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Residual::Exact(q) => q.to_f64(),
            Residual::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Residual::Exact(_))
    }
}

impl fmt::Display for Residual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Residual::Exact(q) => f.write_str(&q.pretty()),
            Residual::Approx(x) => write!(f, "{x:.3e}"),
        }
    }
}

impl Serialize for Residual {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Residual::Exact(q) => q.serialize(s),
            Residual::Approx(x) => s.serialize_f64(*x),
        }
    }
}

/// Matrix entries: exact rationals or approximate complex numbers.
pub trait Scalar: Clone + fmt::Debug + Send + Sync + 'static {
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_q(q: &QScalar) -> Self;
    fn from_i64(n: i64) -> Self {
        Self::from_q(&QScalar::from_integer(n))
    }

    /// Exact zero test; used for sparsity and for exact-mode decisions.
    fn is_zero(&self) -> bool;
    /// Zero for exact types, below the internal tolerance for approximate ones.
    fn is_negligible(&self) -> bool;

    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn inverse(&self) -> Option<Self>;
    fn conj(&self) -> Self;
    /// Real and strictly positive (beyond the internal tolerance).
    fn is_positive_real(&self) -> bool;
    /// `self += a * b`.
    fn add_mul_assign(&mut self, a: &Self, b: &Self);

    /// Rough size, used only to rank pivot candidates.
    fn magnitude(&self) -> f64;
    fn to_cplx(&self) -> Cplx;

    fn residual_of(m: &Mat<Self>) -> Residual;
    fn parse_entry(v: &serde_json::Value) -> Result<Self, String>;
    fn entry_to_json(&self) -> serde_json::Value;
}

impl Scalar for QScalar {
    const EXACT: bool = true;

    fn zero() -> Self {
        QScalar::zero()
    }
    fn one() -> Self {
        QScalar::one()
    }
    fn from_q(q: &QScalar) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        QScalar::is_zero(self)
    }
    fn is_negligible(&self) -> bool {
        QScalar::is_zero(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        self.recip()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn is_positive_real(&self) -> bool {
        self.is_positive()
    }
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self += &(a * b);
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
    fn to_cplx(&self) -> Cplx {
        Cplx::from_q(self)
    }
    fn residual_of(m: &Mat<Self>) -> Residual {
        let max = m.data().iter().map(QScalar::abs).max().unwrap_or_else(QScalar::zero);
        Residual::Exact(max)
    }
    fn parse_entry(v: &serde_json::Value) -> Result<Self, String> {
        match v {
            serde_json::Value::String(s) => s.parse().map_err(|e: crate::Error| e.to_string()),
            serde_json::Value::Number(n) if n.is_i64() => Ok(QScalar::from_integer(n.as_i64().unwrap())),
            other => Err(format!("expected a rational string, got {other}")),
        }
    }
    fn entry_to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

impl Scalar for Cplx {
    const EXACT: bool = false;

    fn zero() -> Self {
        Cplx::zero()
    }
    fn one() -> Self {
        Cplx::one()
    }
    fn from_q(q: &QScalar) -> Self {
        Cplx::from_q(q)
    }
    fn is_zero(&self) -> bool {
        Cplx::is_zero(self)
    }
    fn is_negligible(&self) -> bool {
        self.abs().to_f64() <= INTERNAL_TOL
    }
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        if Cplx::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn conj(&self) -> Self {
        Cplx::conj(self)
    }
    fn is_positive_real(&self) -> bool {
        self.re.to_f64() > INTERNAL_TOL && self.im.abs().to_f64() <= INTERNAL_TOL
    }
    fn add_mul_assign(&mut self, a: &Self, b: &Self) {
        Cplx::add_mul_assign(self, a, b)
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64()
    }
    fn to_cplx(&self) -> Cplx {
        self.clone()
    }
    fn residual_of(m: &Mat<Self>) -> Residual {
        Residual::Approx(m.frobenius().to_f64())
    }
    fn parse_entry(v: &serde_json::Value) -> Result<Self, String> {
        let real = |v: &serde_json::Value| -> Result<Real, String> {
            match v {
                serde_json::Value::String(s) => Real::parse(s).map_err(|e| e.to_string()),
                serde_json::Value::Number(n) => Real::parse(&n.to_string()).map_err(|e| e.to_string()),
                other => Err(format!("expected a decimal string, got {other}")),
            }
        };
        match v {
            serde_json::Value::Array(parts) if parts.len() == 2 => Ok(Cplx::new(real(&parts[0])?, real(&parts[1])?)),
            other => Ok(Cplx::from_real(real(other)?)),
        }
    }
    fn entry_to_json(&self) -> serde_json::Value {
        if self.im.is_zero() {
            serde_json::Value::String(self.re.to_decimal_string())
        } else {
            serde_json::json!([self.re.to_decimal_string(), self.im.to_decimal_string()])
        }
    }
}

/// Serde adapter: a matrix as a JSON array of rows of scalar entries.
pub mod mat_serde {
    use super::*;

    pub fn to_json<S: Scalar>(m: &Mat<S>) -> serde_json::Value {
        serde_json::Value::Array(
            (0..m.rows())
                .map(|i| serde_json::Value::Array((0..m.cols()).map(|j| m[(i, j)].entry_to_json()).collect()))
                .collect(),
        )
    }

    pub fn from_json<S: Scalar>(v: &serde_json::Value) -> Result<Mat<S>, String> {
        let rows = v.as_array().ok_or("matrix must be an array of rows")?;
        let parsed: Vec<Vec<S>> = rows
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| "matrix row must be an array".to_string())?
                    .iter()
                    .map(S::parse_entry)
                    .collect::<Result<Vec<S>, String>>()
            })
            .collect::<Result<_, _>>()?;
        Mat::from_rows(parsed).map_err(|e| e.to_string())
    }

    pub fn serialize<S: Scalar, Ser: Serializer>(m: &Mat<S>, s: Ser) -> Result<Ser::Ok, Ser::Error> {
        to_json(m).serialize(s)
    }

    pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(d: D) -> Result<Mat<S>, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_json(&v).map_err(de::Error::custom)
    }
}

/// Serde adapter for a list of matrices.
pub mod mat_list_serde {
    use super::*;

    pub fn serialize<S: Scalar, Ser: Serializer>(ms: &[Mat<S>], s: Ser) -> Result<Ser::Ok, Ser::Error> {
        let mut seq = s.serialize_seq(Some(ms.len()))?;
        for m in ms {
            seq.serialize_element(&mat_serde::to_json(m))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(d: D) -> Result<Vec<Mat<S>>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(|m| mat_serde::from_json(m).map_err(de::Error::custom))
            .collect()
    }
}
