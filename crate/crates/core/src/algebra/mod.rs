//! Normed division algebras ℝ, ℂ, ℍ, 𝕆 built by Cayley–Dickson doubling,
//! the Hopf maps `𝕂 × 𝕂 → 𝕂 × ℝ` and the harmonic-morphism check.
//!
//! Doubling convention, with `x = (a, b)`, `y = (c, d)` halves:
//!
//! ```text
//! (a, b)(c, d) = (ac − d̄b, da + bc̄)        (a, b)‾ = (ā, −b)
//! ```
//!
//! Resulting quaternion table (row · column):
//!
//! ```text
//!        e1    e2    e3
//!  e1    -1    e3   -e2
//!  e2   -e3    -1    e1
//!  e3    e2   -e1    -1
//! ```
//!
//! For octonions, `e_i · e_j` with `1 ≤ i, j ≤ 7` is `±e_{i xor j}`; the full
//! sign table is produced by `cargo test -p supercrit -- --nocapture
//! octonion_table` and is frozen in `tests/algebra_props.rs`.

mod element;
mod hopf;
mod morphism;

pub use element::{AlgebraElement, DivisionAlgebra};
pub use hopf::{dilation_sq, hopf_map, DilationModel, HopfPoint};
pub use morphism::{fd_laplacian, morphism_residual, DilationCalibration};
