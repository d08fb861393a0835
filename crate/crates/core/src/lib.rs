//! Supercritical semilinear elliptic problems on symmetric domains.
//!
//! The crate follows one pipeline: Cayley–Dickson algebras and Hopf maps
//! ([`algebra`]) produce reductions of problems on `ℝ^N` to weighted
//! problems on low-dimensional profile domains ([`reduction`], [`geometry`]);
//! the reduced problems are discretised and solved ([`solver`]); and the
//! Pohozaev-type sign argument plus the geometric hypotheses are turned into
//! nonexistence/existence certificates ([`certify`]).

pub mod algebra;
pub mod certify;
pub mod error;
pub mod geometry;
pub mod json;
pub mod reduction;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::{Extended, Real, Scalar};

/// Exact rationals for the algebraic identities.
pub type Rational = num_rational::Ratio<i64>;
/// Double-precision elements of `ℝ, ℂ, ℍ, 𝕆`.
pub type Element = algebra::AlgebraElement<f64>;
/// Exact elements, used for the octonion tables.
pub type RationalElement = algebra::AlgebraElement<Rational>;
pub type Point = algebra::HopfPoint<f64>;
