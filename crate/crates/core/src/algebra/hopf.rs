use serde::{Deserialize, Serialize};

use super::{AlgebraElement, DivisionAlgebra};
use crate::error::{ensure, Result};
use crate::scalar::Scalar;

/// A point `(z1, z2)` of `ℝ^N = 𝕂 × 𝕂`, `N = 2·dim 𝕂`.
#[derive(Clone, Debug, PartialEq)]
pub struct HopfPoint<T> {
    pub z1: AlgebraElement<T>,
    pub z2: AlgebraElement<T>,
}

impl<T: Scalar> HopfPoint<T> {
    pub fn new(z1: AlgebraElement<T>, z2: AlgebraElement<T>) -> Result<Self> {
        ensure!(
            z1.dim() == z2.dim(),
            Argument,
            "Hopf point halves differ in dimension ({} vs {})",
            z1.dim(),
            z2.dim()
        );
        Ok(Self { z1, z2 })
    }

    /// Splits a coordinate vector of length `2·dim` into `(z1, z2)`.
    pub fn from_coords(coords: &[T]) -> Result<Self> {
        ensure!(
            coords.len().is_multiple_of(2),
            Argument,
            "odd ambient dimension {}",
            coords.len()
        );
        let h = coords.len() / 2;
        Self::new(
            AlgebraElement::new(coords[..h].to_vec())?,
            AlgebraElement::new(coords[h..].to_vec())?,
        )
    }

    pub fn algebra(&self) -> DivisionAlgebra {
        self.z1.algebra()
    }

    pub fn coords(&self) -> Vec<T> {
        self.z1.coeffs().iter().chain(self.z2.coeffs()).cloned().collect()
    }

    /// Squared Euclidean norm in `ℝ^N`, i.e. `|z1|² + |z2|²`.
    pub fn norm_sqr(&self) -> T {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }
}

/// `π(z1, z2) = (2 z̄1 z2, |z1|² − |z2|²) ∈ ℝ^{dim+1}`.
pub fn hopf_map<T: Scalar>(p: &HopfPoint<T>) -> Vec<T> {
    let two = T::from_int(2);
    let prod =
        p.z1.conjugate()
            .mul(&p.z2)
            .expect("halves share a dimension by construction");
    let mut out: Vec<T> = prod.coeffs().iter().map(|c| two.clone() * c.clone()).collect();
    out.push(p.z1.norm_sqr() - p.z2.norm_sqr());
    out
}

/// Dilation of the Hopf map, `λ²(z) = c*·|π(z)|`.
///
/// The constant is a parameter rather than a literal because its value is
/// pinned by [`DilationModel::calibrated`], which measures it directly from
/// the harmonic-morphism identity. [`DilationModel::STATED`] is the value
/// `c* = 2` that appears in the classical statement of the example; under
/// the map above the identity actually requires `c* = 4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationModel {
    pub constant: f64,
}

impl DilationModel {
    pub const STATED: DilationModel = DilationModel { constant: 2.0 };

    pub fn new(constant: f64) -> Result<Self> {
        ensure!(
            constant.is_finite() && constant > 0.0,
            Argument,
            "dilation constant must be positive, got {constant}"
        );
        Ok(Self { constant })
    }
}

impl Default for DilationModel {
    fn default() -> Self {
        Self::calibrated()
    }
}

pub fn dilation_sq(p: &HopfPoint<f64>, model: &DilationModel) -> f64 {
    model.constant * p.norm_sqr()
}
