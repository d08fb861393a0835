use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::scalar::{Real, Scalar};

/// The four normed division algebras over ℝ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivisionAlgebra {
    Real,
    Complex,
    Quaternion,
    Octonion,
}

impl DivisionAlgebra {
    pub const ALL: [DivisionAlgebra; 4] = [
        DivisionAlgebra::Real,
        DivisionAlgebra::Complex,
        DivisionAlgebra::Quaternion,
        DivisionAlgebra::Octonion,
    ];

    pub fn dim(self) -> usize {
        match self {
            DivisionAlgebra::Real => 1,
            DivisionAlgebra::Complex => 2,
            DivisionAlgebra::Quaternion => 4,
            DivisionAlgebra::Octonion => 8,
        }
    }

    pub fn from_dim(dim: usize) -> Result<Self> {
        match dim {
            1 => Ok(DivisionAlgebra::Real),
            2 => Ok(DivisionAlgebra::Complex),
            4 => Ok(DivisionAlgebra::Quaternion),
            8 => Ok(DivisionAlgebra::Octonion),
            _ => Err(crate::Error::Argument(format!(
                "no normed division algebra of dimension {dim}"
            ))),
        }
    }

    /// Whether multiplication is associative (everything but 𝕆).
    pub fn is_associative(self) -> bool {
        self != DivisionAlgebra::Octonion
    }
}

impl fmt::Display for DivisionAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DivisionAlgebra::Real => "R",
            DivisionAlgebra::Complex => "C",
            DivisionAlgebra::Quaternion => "H",
            DivisionAlgebra::Octonion => "O",
        })
    }
}

/// An element of ℝ, ℂ, ℍ or 𝕆 in the standard basis `e0, …, e_{dim-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> AlgebraElement<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        DivisionAlgebra::from_dim(coeffs.len())?;
        Ok(Self { coeffs })
    }

    pub fn zero(algebra: DivisionAlgebra) -> Self {
        Self {
            coeffs: vec![T::zero(); algebra.dim()],
        }
    }

    pub fn one(algebra: DivisionAlgebra) -> Self {
        Self::basis(algebra, 0)
    }

    /// The basis unit `e_i`.
    pub fn basis(algebra: DivisionAlgebra, i: usize) -> Self {
        assert!(i < algebra.dim(), "basis index {i} out of range for {algebra}");
        let mut coeffs = vec![T::zero(); algebra.dim()];
        coeffs[i] = T::one();
        Self { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn algebra(&self) -> DivisionAlgebra {
        DivisionAlgebra::from_dim(self.dim()).expect("dimension validated at construction")
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Cayley–Dickson product.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        ensure!(
            self.dim() == rhs.dim(),
            Argument,
            "dimension mismatch in product: {} vs {}",
            self.dim(),
            rhs.dim()
        );
        Ok(Self {
            coeffs: cd_mul(&self.coeffs, &rhs.coeffs),
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        ensure!(self.dim() == rhs.dim(), Argument, "dimension mismatch in sum");
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        ensure!(self.dim() == rhs.dim(), Argument, "dimension mismatch in difference");
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            coeffs: cd_conj(&self.coeffs),
        }
    }

    /// `Σ coeffs²`, exact in rational arithmetic.
    pub fn norm_sqr(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc + c.clone() * c.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl<T: Real> AlgebraElement<T> {
    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }
}

fn cd_conj<T: Scalar>(x: &[T]) -> Vec<T> {
    x.iter()
        .enumerate()
        .map(|(i, c)| if i == 0 { c.clone() } else { -c.clone() })
        .collect()
}

fn cd_mul<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    if n == 1 {
        return vec![x[0].clone() * y[0].clone()];
    }
    let h = n / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let ac = cd_mul(a, c);
    let dbar_b = cd_mul(&cd_conj(d), b);
    let da = cd_mul(d, a);
    let b_cbar = cd_mul(b, &cd_conj(c));
    let mut out = Vec::with_capacity(n);
    out.extend(ac.into_iter().zip(dbar_b).map(|(p, q)| p - q));
    out.extend(da.into_iter().zip(b_cbar).map(|(p, q)| p + q));
    out
}
