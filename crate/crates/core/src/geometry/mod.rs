//! Profile domains and the geometric hypotheses of the nonexistence
//! arguments: double starshapedness, boundary flux of the rotational vector
//! field `χ`, monotonicity of the coefficient `K`, and the radius
//! construction for product-of-spheres domains.

mod chi;
mod monotone;
mod profile;
mod rho;
mod starshape;

pub use chi::{chi_eval, phi, phi_derivative, ChiParams, ChiValue};
pub use monotone::{k_monotonicity_check, KField, KFieldSpec, MonotonicityVerdict, MonotonicityWitness};
pub use profile::{
    make_profile, BoundarySample, BoundingBox, InsideFn, ProfileDomain, ProfileJson, ProfileShape, DEFAULT_DENSITY_2D,
    DEFAULT_DENSITY_3D, TOL_GEO_EXACT, TOL_GEO_POLYGON,
};
pub use rho::{rho_equation, solve_rho};
pub use starshape::{boundary_flux_check, doubly_starshaped_check, StarshapeVerdict, Witness};
