//! Problem transformations: rotational and Hopf reductions to weighted
//! problems in low dimension, critical exponents, and the compactness
//! threshold / level bookkeeping for the multiplicity results.

mod exponents;
mod hopf;
mod levels;
mod problem;
mod rotational;

pub use exponents::critical_exponent;
pub use hopf::{
    hopf_reduce, hopf_section, lift, residual_transfer, LiftedField, ResidualTransfer, TransferOptions, TransferSample,
};
pub use levels::{level_bound, multiplicity_report, ps_threshold, LevelBound, MultiplicityReport, OrbitData};
pub use problem::{constant_fn, ScalarFn, WeightedEllipticProblem};
pub use rotational::{symmetry_reduce, RotationalSpec};
