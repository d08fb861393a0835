use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::geometry::{chi_eval, ChiParams, KField};
use crate::reduction::WeightedEllipticProblem;
use crate::scalar::Scalar;
use crate::solver::{assemble, GridInterpolant, Interpolation, SolveReport};

/// Vector field tested against the equation. Both kinds have `dχ = I` and
/// constant divergence `d`, which is what lets the interior integrals be
/// taken from the discrete Dirichlet form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChiKind {
    /// `χ(x) = x`.
    Identity,
    /// The block field `(φ₁(|y¹|)y¹, …, z)` with every `k_i = 0`, i.e.
    /// `χ = x − (τ₁, …, τ_m, 0)` on the half-spaces `x_i > 0`.
    Profile { taus: Vec<f64> },
}

impl ChiKind {
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            ChiKind::Identity => Ok(x.to_vec()),
            ChiKind::Profile { taus } => {
                let params = ChiParams::new(taus.clone(), vec![0; taus.len()], x.len())?;
                Ok(chi_eval(x, &params)?.vector)
            }
        }
    }
}

/// The four integrals of the Pucci–Serrin identity
/// `½∫_{∂Ω}|∇u|²⟨χ,ν⟩ = ∫divχ(K|u|^p/p − |∇u|²/2) + (1/p)∫|u|^p⟨χ,∇K⟩ + ∫⟨dχ∇u,∇u⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PohozaevTerms {
    pub boundary_term: f64,
    pub div_term: f64,
    pub grad_k_term: f64,
    pub dchi_term: f64,
    /// `|boundary − (div + gradK + dchi)|`.
    pub residual: f64,
    /// `residual / |boundary|` (zero when both vanish).
    pub relative_residual: f64,
}

/// Distance of the normal-derivative stencil from the boundary, in cells.
const NORMAL_OFFSET_CELLS: f64 = 3.0;

/// Evaluates the identity's terms for a converged solution of
/// `−Δu = K|u|^{p−2}u`.
///
/// Interior integrals use node quadrature and the discrete Dirichlet form
/// `h^d·uᵀAu ≈ ∫|∇u|²`; the boundary term uses the profile's quadrature with
/// `∂_νu ≈ −(4u(x−δν) − u(x−2δν))/(2δ)`, `δ = 3h`, values from a local cubic
/// interpolant.
pub fn pohozaev_terms(
    report: &SolveReport,
    problem: &WeightedEllipticProblem,
    chi: &ChiKind,
    k: &KField,
) -> Result<PohozaevTerms> {
    ensure!(report.converged, Argument, "the solve report has not converged");
    let grid = report.field.grid().clone();
    let disc = assemble(problem, grid.clone())?;
    let u = report.field.values();
    let p = problem.exponent;
    let vol = grid.cell_volume();
    let d = grid.dim() as f64;

    for (i, &id) in grid.nodes().iter().enumerate().step_by(97) {
        let x = grid.coords(id);
        let (a, q, c0) = ((problem.weight)(&x), disc.coefficient[i], disc.linear_term[i]);
        ensure!(
            a == 1.0 && c0 == 0.0 && (q - k.eval(&x)).abs() <= 1e-12 * q.abs(),
            Argument,
            "the identity is evaluated for -Δu = K|u|^(p-2)u only"
        );
    }

    let dirichlet = vol * disc.dirichlet_form(u);
    let mut potential = 0.0;
    let mut grad_k = 0.0;
    for (i, ui) in u.iter().enumerate() {
        let x = grid.inside_coords(i);
        let up = ui.abs().powf(p);
        potential += k.eval(&x) * up;
        let dk = k.grad(&x);
        if dk.iter().any(|g| *g != 0.0) {
            let c = chi.eval(&x)?;
            grad_k += up * c.iter().zip(&dk).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    let div_term = d * (vol * potential / p - 0.5 * dirichlet);
    let grad_k_term = vol * grad_k / p;
    let dchi_term = dirichlet;

    let interp = GridInterpolant::new(&report.field, Interpolation::LocalCubic);
    let delta = NORMAL_OFFSET_CELLS * grid.h();
    let mut boundary = 0.0;
    for s in problem.domain.samples() {
        let at = |t: f64| -> Vec<f64> { s.point.iter().zip(&s.normal).map(|(x, n)| x - t * n).collect() };
        let (u1, u2) = (interp.eval(&at(delta)), interp.eval(&at(2.0 * delta)));
        let dn = -(4.0 * u1 - u2) / (2.0 * delta);
        let c = chi.eval(&s.point)?;
        let flux: f64 = c.iter().zip(&s.normal).map(|(a, b)| a * b).sum();
        boundary += 0.5 * s.weight * dn * dn * flux;
    }
    let residual = (boundary - (div_term + grad_k_term + dchi_term)).abs();
    Ok(PohozaevTerms {
        boundary_term: boundary,
        div_term,
        grad_k_term,
        dchi_term,
        residual,
        relative_residual: if boundary != 0.0 {
            residual / boundary.abs()
        } else {
            residual
        },
    })
}

/// `(N−k)(1/p − 1/2 + α/(N−k))·∫|∇u|²`. Positive values are incompatible
/// with a nontrivial solution when the geometric hypotheses hold; the sign
/// changes exactly at `p = 2(N−k)/(N−k−2α)`.
pub fn final_inequality<T: Scalar>(grad_integral: T, n: i64, k: i64, p: T, alpha: T) -> Result<T> {
    ensure!(
        grad_integral > T::zero(),
        Argument,
        "gradient integral must be positive"
    );
    ensure!(n - k >= 3, Argument, "need N − k ≥ 3, got {}", n - k);
    ensure!(p > T::zero(), Argument, "exponent must be positive");
    let nk = T::from_int(n - k);
    let half = T::one() / T::from_int(2);
    Ok(nk.clone() * (T::one() / p - half + alpha / nk) * grad_integral)
}

#[cfg(test)]
mod tests {
    use num_rational::Ratio;

    use super::*;
    use crate::reduction::critical_exponent;

    #[test]
    fn sign_changes_at_threshold() {
        let (n, k) = (7, 2);
        let crit = critical_exponent::<Ratio<i64>>(n, k).unwrap().finite().unwrap();
        let one = Ratio::from_integer(1);
        assert_eq!(final_inequality(one, n, k, crit, one).unwrap(), Ratio::from_integer(0));
        let below = final_inequality(1.0, n, k, 3.0, 1.0).unwrap();
        let above = final_inequality(1.0, n, k, 4.0, 1.0).unwrap();
        assert!(below > 0.0 && above < 0.0);
    }

    #[test]
    fn preconditions() {
        assert!(final_inequality(0.0, 5, 1, 3.0, 1.0).is_err());
        assert!(final_inequality(1.0, 5, 3, 3.0, 1.0).is_err());
    }

    #[test]
    fn profile_chi_is_shifted_identity() {
        let c = ChiKind::Profile { taus: vec![2.0] }.eval(&[2.5, 0.3]).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-15 && c[1] == 0.3);
    }
}
