//! Numeric fields the simulation can run over.
//!
//! Averages computed from superposed sums produce repeating fractions, so the
//! engine is generic over [`Scalar`]. [`Exact`] (arbitrary precision rationals)
//! turns "reached consensus" into a literal equality test; `f64` is the fast
//! path and is compared with a relative tolerance.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Exact rational number type used by the exact numeric mode.
pub type Exact = BigRational;

/// A totally ordered field the protocols can be evaluated in.
pub trait Scalar:
    Clone
    + PartialOrd
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    fn zero() -> Self;

    fn one() -> Self {
        Self::from_count(1)
    }

    fn from_count(n: usize) -> Self;

    /// Converts a finite double without rounding; `None` for NaN or infinities.
    fn from_f64(v: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    /// Larger of the two values, preferring `self` on ties.
    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Exact textual form (`p/q` for rationals, shortest round-trip for doubles).
    fn exact_repr(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn from_count(n: usize) -> Self {
        n as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Exact {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }

    fn from_count(n: usize) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Largest element of a nonempty slice.
pub fn max_of<S: Scalar>(values: &[S]) -> Option<S> {
    values.iter().cloned().reduce(S::max_of)
}
