//! Scalar abstractions shared by the algebraic parts of the crate.
//!
//! Anything that only needs field operations (Cayley–Dickson products,
//! critical exponents, the Pohozaev sign test) is written against [`Scalar`]
//! so it can run in exact rational arithmetic. Anything that needs square
//! roots or transcendental functions asks for [`Real`].

use std::fmt::{self, Debug, Display};
use std::ops::Neg;

use num_traits::{Float, FromPrimitive, Num};
use serde::{Serialize, Serializer};

/// A field-like scalar: `f32`, `f64` or an exact rational.
pub trait Scalar: Num + Clone + PartialOrd + Neg<Output = Self> + FromPrimitive + Debug {
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer representable in scalar type")
    }
}

impl<T> Scalar for T where T: Num + Clone + PartialOrd + Neg<Output = T> + FromPrimitive + Debug {}

/// Floating point scalars.
pub trait Real: Scalar + Float + Copy + Send + Sync {}

impl Real for f32 {}
impl Real for f64 {}

/// A value on the extended half line: finite or `+∞`.
///
/// `+∞` is its own variant so it can never be confused with a large finite
/// result (or with `f64::INFINITY` produced by an overflow).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Extended<T> {
    Finite(T),
    PosInfinity,
}

impl<T> Extended<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::PosInfinity => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::PosInfinity => Extended::PosInfinity,
        }
    }
}

impl<T: PartialOrd> Extended<T> {
    /// `x < self`, treating `+∞` as larger than every finite value.
    pub fn exceeds(&self, x: &T) -> bool {
        match self {
            Extended::Finite(v) => x < v,
            Extended::PosInfinity => true,
        }
    }
}

impl<T: PartialOrd> PartialOrd for Extended<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.partial_cmp(b),
            (Extended::Finite(_), Extended::PosInfinity) => Some(Less),
            (Extended::PosInfinity, Extended::Finite(_)) => Some(Greater),
            (Extended::PosInfinity, Extended::PosInfinity) => Some(Equal),
        }
    }
}

impl<T: Display> Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::PosInfinity => f.write_str("+inf"),
        }
    }
}

impl<T: Serialize> Serialize for Extended<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => v.serialize(s),
            Extended::PosInfinity => s.serialize_str("+inf"),
        }
    }
}
