//! Scalar abstraction shared by the exact (rational) and floating-point paths.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Numeric field the root-system and operator code is generic over.
///
/// Implemented for `f64` (tolerance-based comparisons) and [`Rational`]
/// (exact equality).
pub trait Scalar: Num + Signed + Clone + PartialOrd + Debug + Display + Send + Sync + 'static {
    /// Whether arithmetic in this field is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    /// Exact conversion where possible; `None` for non-finite input.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn from_rational(r: &Rational) -> Self;

    /// Equality for exact fields, absolute tolerance otherwise.
    fn near(&self, other: &Self, tol: f64) -> bool;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_rational(r: &Rational) -> Self {
        Scalar::to_f64(r)
    }

    fn near(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Fallback for huge numerators/denominators.
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn near(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

/// Build a rational `num/den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn norm_sq<S: Scalar>(a: &[S]) -> S {
    dot(a, a)
}

pub(crate) fn is_zero_vec<S: Scalar>(a: &[S]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub(crate) fn two<S: Scalar>() -> S {
    S::one() + S::one()
}

pub(crate) fn half<S: Scalar>() -> S {
    S::one() / two::<S>()
}

pub(crate) fn from_usize<S: Scalar>(v: usize) -> S {
    S::from_i64(v as i64)
}
