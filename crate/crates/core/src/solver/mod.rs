//! Finite differences on masked uniform grids and variational solvers for
//! `−div(a∇v) + c₀v = Q|v|^{p−2}v` with Dirichlet data.
//!
//! Everything here works in `f64`; grids are 2-D or 3-D.

mod energy;
mod export;
mod grid;
mod interp;
mod mountain_pass;
mod operator;
mod shooting;

pub use energy::{energy, energy_and_gradient, ray_maximiser, ray_maximum, residual, EnergyGradient};
pub use export::{field_to_csv, field_to_pgm, write_csv, write_pgm};
pub use grid::{Field, MaskedGrid};
pub use interp::{GridInterpolant, Interpolation};
pub use mountain_pass::{
    continuation_in_p, mountain_pass_solve, nodal_domains, sign_changing_solve, Reflection, ReportJson, SolveReport,
    SolverOptions, P_MARGIN,
};
pub use operator::{
    assemble, boundary_fraction, dot, minres, pcg, CgReport, CsrMatrix, Discretization, MIN_RESOLUTION,
};
pub use shooting::{shoot_radial, shoot_radial_on_ball, RadialSample, RadialSolution};

use crate::reduction::critical_exponent;

/// `2d/(d−2)` for `d ≥ 3`; `None` in the plane, where every `p` is compact.
pub fn compactness_threshold(d: usize) -> Option<f64> {
    if d < 3 {
        return None;
    }
    critical_exponent::<f64>(d as i64, 0).ok().and_then(|e| e.finite())
}
