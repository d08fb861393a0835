use std::sync::Arc;

use crate::error::{ensure, Result};
use crate::geometry::{KField, ProfileDomain};
use crate::reduction::problem::{constant_fn, ScalarFn, WeightedEllipticProblem};

/// `Ω = {(y¹,…,y^m, z) : (|y¹|,…,|y^m|, z) ∈ Θ}` with `y^i ∈ ℝ^{k_i+1}` and
/// coefficient `K` given on `Θ`.
#[derive(Clone)]
pub struct RotationalSpec {
    pub multiplicities: Vec<u32>,
    pub ambient: usize,
    pub profile: ProfileDomain,
    pub k: KField,
}

impl std::fmt::Debug for RotationalSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RotationalSpec")
            .field("multiplicities", &self.multiplicities)
            .field("ambient", &self.ambient)
            .field("profile", self.profile.shape())
            .finish()
    }
}

impl RotationalSpec {
    pub fn new(multiplicities: Vec<u32>, ambient: usize, profile: ProfileDomain, k: KField) -> Result<Self> {
        ensure!(
            !multiplicities.is_empty(),
            Argument,
            "at least one rotated block is required"
        );
        let spec = Self {
            multiplicities,
            ambient,
            profile,
            k,
        };
        ensure!(
            spec.profile.dimension() == spec.reduced_dimension(),
            Argument,
            "profile lives in ℝ^{} but N − k = {}",
            spec.profile.dimension(),
            spec.reduced_dimension()
        );
        ensure!(
            spec.m() <= spec.reduced_dimension(),
            Argument,
            "m = {} exceeds the profile dimension {}",
            spec.m(),
            spec.reduced_dimension()
        );
        Ok(spec)
    }

    pub fn m(&self) -> usize {
        self.multiplicities.len()
    }

    pub fn k_total(&self) -> usize {
        self.multiplicities.iter().map(|k| *k as usize).sum()
    }

    /// `N − k`, the dimension of the profile space.
    pub fn reduced_dimension(&self) -> usize {
        self.ambient.saturating_sub(self.k_total())
    }

    /// `a(x) = x₁^{k₁}···x_m^{k_m}`.
    pub fn weight_fn(&self) -> ScalarFn {
        let ks = self.multiplicities.clone();
        Arc::new(move |x: &[f64]| ks.iter().zip(x).map(|(k, xi)| xi.powi(*k as i32)).product())
    }
}

/// `−div(a∇v) = aK|v|^{p−2}v` on `Θ` with `a = x₁^{k₁}···x_m^{k_m}`.
pub fn symmetry_reduce(spec: &RotationalSpec, p: f64) -> Result<WeightedEllipticProblem> {
    let m = spec.m();
    let interior = spec.profile.interior_samples(12);
    for x in spec.profile.samples().iter().map(|s| &s.point).chain(&interior) {
        ensure!(
            x[..m].iter().all(|c| *c > 0.0),
            Domain,
            "profile point {x:?} has a non-positive rotational coordinate"
        );
    }
    let a = spec.weight_fn();
    let aq = a.clone();
    let k = spec.k.clone();
    let q: ScalarFn = Arc::new(move |x: &[f64]| aq(x) * k.eval(x));
    let ks = spec
        .multiplicities
        .iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(",");
    WeightedEllipticProblem::new(
        spec.profile.clone(),
        a,
        q,
        constant_fn(0.0),
        p,
        format!("-div(a∇v) = aK|v|^{{p-2}}v, a = Π x_i^k_i, k = ({ks})"),
    )
}
