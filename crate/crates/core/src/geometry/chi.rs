use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::scalar::Real;

/// `φ(t) = (1 − (τ/t)^{k+1}) / (k+1)`, the solution of
/// `t·φ'(t) + (k+1)·φ(t) = 1` with `φ(τ) = 0`.
pub fn phi<T: Real>(t: T, tau: T, k: u32) -> Result<T> {
    ensure!(t > T::zero(), Argument, "phi needs t > 0, got {t:?}");
    ensure!(tau > T::zero(), Argument, "phi needs tau > 0, got {tau:?}");
    let kp1 = T::from_int(k as i64 + 1);
    Ok((T::one() - (tau / t).powi(k as i32 + 1)) / kp1)
}

/// `φ'(t) = τ^{k+1} t^{−k−2}`.
pub fn phi_derivative<T: Real>(t: T, tau: T, k: u32) -> Result<T> {
    ensure!(t > T::zero(), Argument, "phi needs t > 0, got {t:?}");
    ensure!(tau > T::zero(), Argument, "phi needs tau > 0, got {tau:?}");
    Ok((tau / t).powi(k as i32 + 1) / t)
}

/// Parameters of the rotational vector field
/// `χ(y¹, …, y^m, z) = (φ₁(|y¹|)y¹, …, φ_m(|y^m|)y^m, z)` on
/// `ℝ^{k₁+1} × … × ℝ^{k_m+1} × ℝ^{N−k−m}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiParams {
    pub taus: Vec<f64>,
    pub ks: Vec<u32>,
    pub ambient: usize,
}

impl ChiParams {
    pub fn new(taus: Vec<f64>, ks: Vec<u32>, ambient: usize) -> Result<Self> {
        ensure!(!taus.is_empty(), Argument, "at least one rotational block is required");
        ensure!(
            taus.len() == ks.len(),
            Argument,
            "taus and multiplicities differ in length"
        );
        ensure!(
            taus.iter().all(|t| *t > 0.0 && t.is_finite()),
            Argument,
            "every tau must be positive"
        );
        let p = Self { taus, ks, ambient };
        ensure!(
            p.k_total() + p.m() <= ambient,
            Argument,
            "blocks of total size {} do not fit in dimension {ambient}",
            p.k_total() + p.m()
        );
        Ok(p)
    }

    pub fn m(&self) -> usize {
        self.taus.len()
    }

    pub fn k_total(&self) -> usize {
        self.ks.iter().map(|k| *k as usize).sum()
    }

    /// Dimension of the trailing `z` block.
    pub fn z_dim(&self) -> usize {
        self.ambient - self.k_total() - self.m()
    }

    /// Index ranges of the `y^i` blocks inside a point of `ℝ^N`.
    pub fn blocks(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.ks
            .iter()
            .map(|k| {
                let r = start..start + *k as usize + 1;
                start = r.end;
                r
            })
            .collect()
    }

    /// The profile-space form of the field, `(φ₁(x₁)x₁, …, φ_m(x_m)x_m, z)`
    /// at a point `(x₁, …, x_m, z)` of `ℝ^{N−k}`.
    pub fn profile_field(&self, x: &[f64]) -> Result<Vec<f64>> {
        ensure!(
            x.len() == self.ambient - self.k_total(),
            Argument,
            "profile point has dimension {}, expected {}",
            x.len(),
            self.ambient - self.k_total()
        );
        let mut out = x.to_vec();
        for i in 0..self.m() {
            if x[i] <= 0.0 {
                return Err(Error::Domain(format!("profile coordinate {i} is {} ≤ 0", x[i])));
            }
            out[i] = phi(x[i], self.taus[i], self.ks[i])? * x[i];
        }
        Ok(out)
    }

    /// Embeds a profile point `(x₁, …, x_m, z)` into `ℝ^N` as
    /// `(x₁e₁, …, x_m e₁, z)`.
    pub fn embed(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient];
        for (i, r) in self.blocks().into_iter().enumerate() {
            out[r.start] = x[i];
        }
        let z0 = self.k_total() + self.m();
        out[z0..].copy_from_slice(&x[self.m()..]);
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiValue {
    pub vector: Vec<f64>,
    /// `div χ`, which is identically `N − k`.
    pub divergence: f64,
    /// `max{1 − k_iφ_i(|y^i|), 1}`, the bound on `⟨dχ[ξ], ξ⟩/|ξ|²`.
    pub quad_bound: f64,
}

pub fn chi_eval(point: &[f64], params: &ChiParams) -> Result<ChiValue> {
    ensure!(
        point.len() == params.ambient,
        Argument,
        "point has dimension {}, expected {}",
        point.len(),
        params.ambient
    );
    let mut vector = point.to_vec();
    let mut quad_bound = 1.0f64;
    for (i, block) in params.blocks().into_iter().enumerate() {
        let norm = point[block.clone()].iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Domain(format!(
                "block y^{} vanishes; the field is singular there",
                i + 1
            )));
        }
        let f = phi(norm, params.taus[i], params.ks[i])?;
        for c in &mut vector[block] {
            *c *= f;
        }
        quad_bound = quad_bound.max(1.0 - params.ks[i] as f64 * f);
    }
    Ok(ChiValue {
        vector,
        divergence: (params.ambient - params.k_total()) as f64,
        quad_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_vanishes_at_tau() {
        assert_eq!(phi(1.7, 1.7, 3).unwrap(), 0.0);
    }

    #[test]
    fn phi_far_field() {
        let v: f64 = phi(1e6, 1.0, 1).unwrap();
        assert!((v - 0.5 * (1.0 - 1e-12)).abs() < 1e-16);
    }

    #[test]
    fn phi_rejects_nonpositive_t() {
        assert!(phi(0.0, 1.0, 1).is_err());
        assert!(phi(-1.0f32, 1.0, 1).is_err());
    }

    #[test]
    fn divergence_is_n_minus_k() {
        let p = ChiParams::new(vec![1.0], vec![2], 7).unwrap();
        let v = chi_eval(&[0.3, 0.4, 1.2, 0.0, 1.0, -2.0, 0.5], &p).unwrap();
        assert_eq!(v.divergence, 5.0);
    }

    #[test]
    fn quad_bound_is_one_on_tau_spheres() {
        let p = ChiParams::new(vec![1.0, 2.0], vec![1, 2], 7).unwrap();
        // |y¹| = 1, |y²| = 2.
        let x = [0.6, 0.8, 0.0, 2.0, 0.0, 0.3, -0.1];
        assert_eq!(chi_eval(&x, &p).unwrap().quad_bound, 1.0);
    }

    #[test]
    fn zero_block_is_a_domain_error() {
        let p = ChiParams::new(vec![1.0], vec![1], 4).unwrap();
        assert!(matches!(chi_eval(&[0.0, 0.0, 1.0, 1.0], &p), Err(Error::Domain(_))));
    }

    #[test]
    fn embed_places_radii_on_first_axis() {
        let p = ChiParams::new(vec![1.0, 1.0], vec![1, 2], 7).unwrap();
        assert_eq!(p.embed(&[2.0, 3.0, 4.0, 5.0]), vec![2.0, 0.0, 3.0, 0.0, 0.0, 4.0, 5.0]);
    }
}
