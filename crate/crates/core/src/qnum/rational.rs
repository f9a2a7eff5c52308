//! Exact arbitrary-precision rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::{Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number, always stored in lowest terms with a positive
/// denominator.
///
/// `Display` and the serde representation always use the `"p/q"` form
/// (`"5/2"`, `"-3/1"`, `"0/1"`); [`QScalar::pretty`] drops a unit denominator.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QScalar(Rational);

impl QScalar {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Ok(QScalar(Rational::from((num, den))))
    }

    pub fn zero() -> Self {
        QScalar(Rational::new())
    }

    pub fn one() -> Self {
        QScalar(Rational::from(1))
    }

    pub fn from_integer(n: i64) -> Self {
        QScalar(Rational::from(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        QScalar(r)
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn numer(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denom(&self) -> &Integer {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.cmp0() == Ordering::Equal
    }

    pub fn is_one(&self) -> bool {
        *self.0.numer() == 1 && *self.0.denom() == 1
    }

    pub fn is_positive(&self) -> bool {
        self.0.cmp0() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.0.cmp0() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        QScalar(self.0.clone().abs())
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(QScalar(self.0.clone().recip()))
        }
    }

    /// Integer power; negative exponents invert. `0^e` for `e < 0` panics.
    pub fn pow(&self, e: i64) -> Self {
        let mag = e.unsigned_abs();
        let mut acc = Rational::from(1);
        let mut base = self.0.clone();
        let mut m = mag;
        while m > 0 {
            if m & 1 == 1 {
                acc *= &base;
            }
            m >>= 1;
            if m > 0 {
                base.square_mut();
            }
        }
        if e < 0 {
            assert!(acc.cmp0() != Ordering::Equal, "zero to a negative power");
            acc.recip_mut();
        }
        QScalar(acc)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Human-facing form: integers without the `/1`.
    pub fn pretty(&self) -> String {
        if *self.0.denom() == 1 {
            self.0.numer().to_string()
        } else {
            self.to_string()
        }
    }
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty())
    }
}

impl FromStr for QScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Parse(format!("expected a rational `p/q`, got `{s}`"));
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: Integer = num.parse().map_err(|_| bad())?;
        let den: Integer = den.parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        Ok(QScalar(Rational::from((num, den))))
    }
}

impl From<i64> for QScalar {
    fn from(n: i64) -> Self {
        QScalar::from_integer(n)
    }
}

impl From<i32> for QScalar {
    fn from(n: i32) -> Self {
        QScalar::from_integer(n.into())
    }
}

impl Serialize for QScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $assign_tr:ident, $assign:ident) => {
        impl<'a> $tr<&'a QScalar> for &'a QScalar {
            type Output = QScalar;
            fn $method(self, rhs: &'a QScalar) -> QScalar {
                QScalar(Rational::from((&self.0).$method(&rhs.0)))
            }
        }
        impl $tr<QScalar> for QScalar {
            type Output = QScalar;
            fn $method(mut self, rhs: QScalar) -> QScalar {
                self.0.$assign(rhs.0);
                self
            }
        }
        impl<'a> $tr<&'a QScalar> for QScalar {
            type Output = QScalar;
            fn $method(mut self, rhs: &'a QScalar) -> QScalar {
                self.0.$assign(&rhs.0);
                self
            }
        }
        impl<'a> $assign_tr<&'a QScalar> for QScalar {
            fn $assign(&mut self, rhs: &'a QScalar) {
                self.0.$assign(&rhs.0);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);

impl<'a> Div<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn div(self, rhs: &'a QScalar) -> QScalar {
        assert!(!rhs.is_zero(), "division by zero");
        QScalar(Rational::from(&self.0 / &rhs.0))
    }
}

impl Div<QScalar> for QScalar {
    type Output = QScalar;
    fn div(self, rhs: QScalar) -> QScalar {
        &self / &rhs
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar(-self.0)
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar(Rational::from(-&self.0))
    }
}
