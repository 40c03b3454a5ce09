use std::fmt::{Debug, Display};
use std::ops::{Add, Mul};

use num_rational::Rational64;
use num_traits::{One, Zero};

/// Scalars arrays are built from. Comparison is exact except for floats,
/// which compare within an absolute tolerance.
pub trait Semiring:
    Clone
    + Debug
    + Display
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    const NAME: &'static str;

    fn from_i64(v: i64) -> Self;

    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl Semiring for i64 {
    const NAME: &'static str = "int";

    fn from_i64(v: i64) -> Self {
        v
    }
}

impl Semiring for Rational64 {
    const NAME: &'static str = "rational";

    fn from_i64(v: i64) -> Self {
        Rational64::from_integer(v)
    }
}

impl Semiring for f64 {
    const NAME: &'static str = "float";

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
}
