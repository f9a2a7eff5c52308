//! High-precision approximate reals and complex numbers.
//!
//! Values are MPFR floats at a process-wide working precision (default 128
//! significand bits). Equality is only ever decided against a tolerance; the
//! types deliberately do not implement `PartialEq`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use rug::float::Round;
use rug::Float;

use super::QScalar;
use crate::error::{Error, Result};

/// Default working precision in significand bits.
pub const DEFAULT_PRECISION: u32 = 128;
/// Smallest precision accepted by [`set_precision`].
pub const MIN_PRECISION: u32 = 64;
/// Tolerance for internal approximate-equality decisions.
pub const INTERNAL_TOL: f64 = 1e-20;
/// Default pass threshold for reported residuals.
pub const REPORT_TOL: f64 = 1e-8;

static PRECISION: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION);

pub fn precision() -> u32 {
    PRECISION.load(AtomicOrdering::Relaxed)
}

/// Set the working precision for newly created approximate values.
pub fn set_precision(bits: u32) -> Result<()> {
    if bits < MIN_PRECISION {
        return Err(Error::InvalidParameter(format!(
            "precision must be at least {MIN_PRECISION} bits, got {bits}"
        )));
    }
    PRECISION.store(bits, AtomicOrdering::Relaxed);
    Ok(())
}

/// Unit roundoff at the current precision, as an `f64`.
pub fn epsilon() -> f64 {
    2f64.powi(1 - precision() as i32)
}

/// A real number at the working precision.
#[derive(Clone)]
pub struct Real(Float);

impl Real {
    pub fn zero() -> Self {
        Real(Float::new(precision()))
    }

    pub fn one() -> Self {
        Real(Float::with_val(precision(), 1))
    }

    pub fn from_f64(x: f64) -> Self {
        Real(Float::with_val(precision(), x))
    }

    pub fn from_i64(x: i64) -> Self {
        Real(Float::with_val(precision(), x))
    }

    pub fn from_q(q: &QScalar) -> Self {
        Real(Float::with_val(precision(), q.as_rational()))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.cmp0() == Some(Ordering::Less)
    }

    pub fn is_sign_positive(&self) -> bool {
        self.0.cmp0() == Some(Ordering::Greater)
    }

    pub fn abs(&self) -> Real {
        Real(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Real {
        Real(self.0.clone().sqrt())
    }

    pub fn ln(&self) -> Real {
        Real(self.0.clone().ln())
    }

    /// `self^(1/n)` for a positive real.
    pub fn root(&self, n: u32) -> Real {
        Real(self.0.clone().root(n))
    }

    pub fn recip(&self) -> Real {
        Real(self.0.clone().recip())
    }

    pub fn square(&self) -> Real {
        Real(self.0.clone().square())
    }

    pub fn max(self, other: Real) -> Real {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    pub fn total_cmp(&self, other: &Real) -> Ordering {
        self.0.total_cmp(&other.0)
    }

    /// Nearest integer (ties away from zero).
    pub fn round_to_i64(&self) -> Option<i64> {
        self.0.to_integer_round(Round::Nearest).and_then(|(i, _)| i.to_i64())
    }

    /// `|self - other| <= tol`.
    pub fn approx_eq(&self, other: &Real, tol: f64) -> bool {
        (self - other).abs().to_f64() <= tol
    }

    /// Decimal string carrying all significant digits of the working
    /// precision; round-trips through [`Real::parse`].
    pub fn to_decimal_string(&self) -> String {
        if self.0.is_zero() {
            return "0".into();
        }
        let digits = (self.0.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
        self.0.to_string_radix(10, Some(digits))
    }

    pub fn parse(s: &str) -> Result<Real> {
        let t = s.trim();
        if t.contains('/') {
            let q: QScalar = t.parse()?;
            return Ok(Real::from_q(&q));
        }
        let parsed = Float::parse(t).map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
        Ok(Real(Float::with_val(precision(), parsed)))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.0.to_f64())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

macro_rules! real_binop {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign:ident) => {
        impl<'a> $tr<&'a Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                Real(Float::with_val(precision(), (&self.0).$method(&rhs.0)))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(mut self, rhs: Real) -> Real {
                self.0.$assign(&rhs.0);
                self
            }
        }
        impl<'a> $tr<&'a Real> for Real {
            type Output = Real;
            fn $method(mut self, rhs: &'a Real) -> Real {
                self.0.$assign(&rhs.0);
                self
            }
        }
        impl<'a> $assign_tr<&'a Real> for Real {
            fn $assign(&mut self, rhs: &'a Real) {
                self.0.$assign(&rhs.0);
            }
        }
    };
}

real_binop!(Add, add, AddAssign, add_assign);
real_binop!(Sub, sub, SubAssign, sub_assign);
real_binop!(Mul, mul, MulAssign, mul_assign);

impl<'a> Div<&'a Real> for &'a Real {
    type Output = Real;
    fn div(self, rhs: &'a Real) -> Real {
        Real(Float::with_val(precision(), &self.0 / &rhs.0))
    }
}

impl Div<Real> for Real {
    type Output = Real;
    fn div(mut self, rhs: Real) -> Real {
        self.0 /= &rhs.0;
        self
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(Float::with_val(precision(), -&self.0))
    }
}

/// A complex number with [`Real`] parts.
#[derive(Clone)]
pub struct Cplx {
    pub re: Real,
    pub im: Real,
}

impl Cplx {
    pub fn new(re: Real, im: Real) -> Self {
        Cplx { re, im }
    }

    pub fn zero() -> Self {
        Cplx::new(Real::zero(), Real::zero())
    }

    pub fn one() -> Self {
        Cplx::new(Real::one(), Real::zero())
    }

    pub fn i() -> Self {
        Cplx::new(Real::zero(), Real::one())
    }

    pub fn from_real(re: Real) -> Self {
        Cplx::new(re, Real::zero())
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Cplx::new(Real::from_f64(re), Real::from_f64(im))
    }

    pub fn from_q(q: &QScalar) -> Self {
        Cplx::from_real(Real::from_q(q))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Cplx {
        Cplx::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Real {
        let mut acc = self.re.square();
        acc.0 += self.im.0.clone().square();
        acc
    }

    pub fn abs(&self) -> Real {
        Real(Float::with_val(precision(), self.re.0.hypot_ref(&self.im.0)))
    }

    pub fn recip(&self) -> Cplx {
        let n = self.norm_sqr();
        Cplx::new(&self.re / &n, -(&self.im / &n))
    }

    pub fn scale(&self, s: &Real) -> Cplx {
        Cplx::new(&self.re * s, &self.im * s)
    }

    /// `self += a * b` without temporaries.
    pub fn add_mul_assign(&mut self, a: &Cplx, b: &Cplx) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let (ar, ai) = (!a.re.0.is_zero(), !a.im.0.is_zero());
        let (br, bi) = (!b.re.0.is_zero(), !b.im.0.is_zero());
        if ar && br {
            self.re.0 += &a.re.0 * &b.re.0;
        }
        if ai && bi {
            self.re.0 -= &a.im.0 * &b.im.0;
        }
        if ar && bi {
            self.im.0 += &a.re.0 * &b.im.0;
        }
        if ai && br {
            self.im.0 += &a.im.0 * &b.re.0;
        }
    }

    pub fn approx_eq(&self, other: &Cplx, tol: f64) -> bool {
        (self - other).abs().to_f64() <= tol
    }
}

impl fmt::Debug for Cplx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{:?}", self.re)
        } else {
            write!(f, "({:?}{:+e}i)", self.re, self.im.to_f64())
        }
    }
}

impl<'a> Add<&'a Cplx> for &'a Cplx {
    type Output = Cplx;
    fn add(self, rhs: &'a Cplx) -> Cplx {
        Cplx::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a Cplx> for &'a Cplx {
    type Output = Cplx;
    fn sub(self, rhs: &'a Cplx) -> Cplx {
        Cplx::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a Cplx> for &'a Cplx {
    type Output = Cplx;
    fn mul(self, rhs: &'a Cplx) -> Cplx {
        let mut out = Cplx::zero();
        out.add_mul_assign(self, rhs);
        out
    }
}

impl<'a> Div<&'a Cplx> for &'a Cplx {
    type Output = Cplx;
    fn div(self, rhs: &'a Cplx) -> Cplx {
        self * &rhs.recip()
    }
}

impl<'a> AddAssign<&'a Cplx> for Cplx {
    fn add_assign(&mut self, rhs: &'a Cplx) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl<'a> SubAssign<&'a Cplx> for Cplx {
    fn sub_assign(&mut self, rhs: &'a Cplx) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl<'a> MulAssign<&'a Cplx> for Cplx {
    fn mul_assign(&mut self, rhs: &'a Cplx) {
        *self = &*self * rhs;
    }
}

impl Neg for &Cplx {
    type Output = Cplx;
    fn neg(self) -> Cplx {
        Cplx::new(-&self.re, -&self.im)
    }
}

impl Neg for Cplx {
    type Output = Cplx;
    fn neg(self) -> Cplx {
        Cplx::new(-self.re, -self.im)
    }
}
