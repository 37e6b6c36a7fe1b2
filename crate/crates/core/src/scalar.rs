//! Real numbers that stay exact when every input is rational, and the circle
//! group built on top of them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A real number in exact rational form or as a float.
///
/// Arithmetic between two exact values stays exact; any float operand makes
/// the result a float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Exact(Rational64),
    Approx(f64),
}

impl Scalar {
    pub const ZERO: Scalar = Scalar::Exact(Rational64::new_raw(0, 1));

    pub fn ratio(numer: i64, denom: i64) -> Scalar {
        Scalar::Exact(Rational64::new(numer, denom))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Approx(v) => v,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(self) -> Option<Rational64> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    /// Reduces into `[0, modulus)`. `modulus` must be positive.
    pub fn rem(self, modulus: Rational64) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                let q = (r / modulus).floor();
                Scalar::Exact(r - q * modulus)
            }
            Scalar::Approx(v) => {
                let m = modulus.to_f64().unwrap_or(1.0);
                let mut out = v.rem_euclid(m);
                if out >= m {
                    out = 0.0;
                }
                Scalar::Approx(out)
            }
        }
    }

    pub fn scale(self, k: i64) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r * k),
            Scalar::Approx(v) => Scalar::Approx(v * k as f64),
        }
    }

    pub fn half(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r / 2),
            Scalar::Approx(v) => Scalar::Approx(v * 0.5),
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(v) => v == 0.0,
        }
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Approx(v)
    }
}

impl From<Rational64> for Scalar {
    fn from(r: Rational64) -> Self {
        Scalar::Exact(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Approx(v) => write!(f, "{v}"),
        }
    }
}

macro_rules! scalar_binop {
    ($Op:ident, $op:ident) => {
        impl $Op for Scalar {
            type Output = Scalar;

            fn $op(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$op(b)),
                    (a, b) => Scalar::Approx(a.to_f64().$op(b.to_f64())),
                }
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx(v) => Scalar::Approx(-v),
        }
    }
}

/// A point of the circle R/Z, always represented in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "Scalar", try_from = "Scalar")]
pub struct TorusValue(Scalar);

impl TorusValue {
    pub const ZERO: TorusValue = TorusValue(Scalar::ZERO);

    pub fn new(value: impl Into<Scalar>) -> TorusValue {
        TorusValue(value.into().rem(Rational64::from_integer(1)))
    }

    pub fn ratio(numer: i64, denom: i64) -> TorusValue {
        TorusValue::new(Scalar::ratio(numer, denom))
    }

    pub fn value(self) -> Scalar {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_exact(self) -> bool {
        self.0.is_exact()
    }

    /// Distance on the circle, in `[0, 1/2]`.
    pub fn distance(self, other: TorusValue) -> f64 {
        let d = (self.to_f64() - other.to_f64()).rem_euclid(1.0);
        d.min(1.0 - d)
    }

    pub fn scale(self, k: i64) -> TorusValue {
        TorusValue::new(self.0.scale(k))
    }
}

impl From<TorusValue> for Scalar {
    fn from(t: TorusValue) -> Scalar {
        t.0
    }
}

impl TryFrom<Scalar> for TorusValue {
    type Error = String;

    fn try_from(s: Scalar) -> std::result::Result<Self, String> {
        Ok(TorusValue::new(s))
    }
}

impl Add for TorusValue {
    type Output = TorusValue;

    fn add(self, rhs: TorusValue) -> TorusValue {
        TorusValue::new(self.0 + rhs.0)
    }
}

impl Sub for TorusValue {
    type Output = TorusValue;

    fn sub(self, rhs: TorusValue) -> TorusValue {
        TorusValue::new(self.0 - rhs.0)
    }
}

impl Neg for TorusValue {
    type Output = TorusValue;

    fn neg(self) -> TorusValue {
        TorusValue::new(-self.0)
    }
}

impl fmt::Display for TorusValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<std::cmp::Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.partial_cmp(b),
            (a, b) => a.to_f64().partial_cmp(&b.to_f64()),
        }
    }
}
