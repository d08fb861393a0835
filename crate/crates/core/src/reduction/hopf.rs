use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{dilation_sq, fd_laplacian, hopf_map, AlgebraElement, DilationModel, DivisionAlgebra, HopfPoint};
use crate::error::{ensure, Error, Result};
use crate::geometry::ProfileDomain;
use crate::reduction::problem::{ScalarFn, WeightedEllipticProblem};
use crate::solver::{Field, GridInterpolant, Interpolation};
use rand_distr::StandardNormal;

/// `−Δv + (a/(c*|x|))v = (1/(c*|x|))|v|^{p−2}v` on `U ⊂ ℝ^{dim 𝕂 + 1}`.
///
/// Its solutions lift through the Hopf map to solutions of
/// `−Δu + au = |u|^{p−2}u` on `π⁻¹(U)`.
pub fn hopf_reduce(u: &ProfileDomain, a: f64, p: f64, model: &DilationModel) -> Result<WeightedEllipticProblem> {
    let d = u.dimension();
    ensure!(d >= 2, Argument, "reduced domain must have dimension at least 2");
    DivisionAlgebra::from_dim(d - 1)?;
    ensure!(
        a >= 0.0 && a.is_finite(),
        Argument,
        "linear coefficient must be non-negative, got {a}"
    );
    ensure!(
        !u.inside(&vec![0.0; d]),
        Domain,
        "the reduced domain contains the origin"
    );
    let c = model.constant;
    let q: ScalarFn = Arc::new(move |x: &[f64]| 1.0 / (c * norm(x)));
    let c0: ScalarFn = Arc::new(move |x: &[f64]| a / (c * norm(x)));
    WeightedEllipticProblem::new(
        u.clone(),
        Arc::new(|_: &[f64]| 1.0),
        q,
        c0,
        p,
        format!("-Δv + ({a}/({c}|x|)) v = (1/({c}|x|)) |v|^{{p-2}} v"),
    )
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// A point of `π⁻¹(x)`: `z1 = √((|x| + x_last)/2)·e`, `z2 = z1·w/(2|z1|²)`
/// for a unit element `e` (alternativity makes `2 z̄1 z2 = w` hold in 𝕆).
pub fn hopf_section(x: &[f64], e: &AlgebraElement<f64>) -> Result<HopfPoint<f64>> {
    let dim = x.len() - 1;
    ensure!(
        e.dim() == dim,
        Argument,
        "fibre element has dimension {}, expected {dim}",
        e.dim()
    );
    let r = norm(x);
    let w = AlgebraElement::new(x[..dim].to_vec())?;
    let s1 = (0.5 * (r + x[dim])).max(0.0);
    if s1 == 0.0 {
        let z2 = e.scale(r.sqrt() / e.norm());
        return HopfPoint::new(AlgebraElement::zero(e.algebra()), z2);
    }
    let z1 = e.scale(s1.sqrt() / e.norm());
    let z2 = z1.mul(&w)?.scale(1.0 / (2.0 * s1));
    HopfPoint::new(z1, z2)
}

/// `u = v∘π` for a grid field `v` on `U`.
#[derive(Clone, Debug)]
pub struct LiftedField {
    interpolant: GridInterpolant,
    domain: ProfileDomain,
    algebra: DivisionAlgebra,
}

/// Lift a reduced field through the Hopf map; `v` is extended by its
/// interpolant inside `U` and by zero outside.
pub fn lift(v: &Field, domain: &ProfileDomain, kind: Interpolation) -> Result<LiftedField> {
    ensure!(
        v.grid().dim() == domain.dimension(),
        Argument,
        "field and domain differ in dimension"
    );
    Ok(LiftedField {
        interpolant: GridInterpolant::new(v, kind),
        domain: domain.clone(),
        algebra: DivisionAlgebra::from_dim(domain.dimension() - 1)?,
    })
}

impl LiftedField {
    pub fn algebra(&self) -> DivisionAlgebra {
        self.algebra
    }

    /// Ambient dimension of `Ω = π⁻¹(U)`.
    pub fn ambient_dimension(&self) -> usize {
        2 * self.algebra.dim()
    }

    /// The reduced field `v(x)`, zero outside `U`.
    pub fn reduced(&self, x: &[f64]) -> f64 {
        if self.domain.inside(x) {
            self.interpolant.eval(x)
        } else {
            0.0
        }
    }

    /// `u(z) = v(π(z))`; errors when `π(z)` is not in the closure of `U`.
    pub fn eval(&self, z: &[f64]) -> Result<f64> {
        let x = self.image(z)?;
        if !self.in_closure(&x) {
            return Err(Error::Domain(format!("π(z) = {x:?} lies outside the reduced domain")));
        }
        Ok(self.reduced(&x))
    }

    /// `u(z)` with zero extension, for stencils that straddle `∂Ω`.
    pub fn eval_extended(&self, z: &[f64]) -> f64 {
        self.image(z).map_or(0.0, |x| self.reduced(&x))
    }

    fn image(&self, z: &[f64]) -> Result<Vec<f64>> {
        ensure!(
            z.len() == self.ambient_dimension(),
            Argument,
            "point has dimension {}, expected {}",
            z.len(),
            self.ambient_dimension()
        );
        Ok(hopf_map(&HopfPoint::from_coords(z)?))
    }

    fn in_closure(&self, x: &[f64]) -> bool {
        if self.domain.inside(x) {
            return true;
        }
        let eps = 1e-9 * (1.0 + norm(x));
        let mut y = x.to_vec();
        (0..x.len()).any(|i| {
            [eps, -eps].iter().any(|d| {
                y[i] = x[i] + d;
                let hit = self.domain.inside(&y);
                y[i] = x[i];
                hit
            })
        })
    }
}

/// One sample of the residual transfer `r_u(z) = λ²(z)·r_v(π(z))`.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TransferSample {
    pub point: Vec<f64>,
    pub image: Vec<f64>,
    pub dilation_sq: f64,
    pub lifted_laplacian: f64,
    pub reduced_laplacian: f64,
    pub lifted_residual: f64,
    pub reduced_residual: f64,
    /// `|Δu / (λ²Δv∘π) − 1|`.
    pub laplacian_error: f64,
    /// `|r_u − λ² r_v∘π|` over `λ²` times the sum of the term magnitudes
    /// of the reduced equation.
    pub residual_error: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidualTransfer {
    pub samples: Vec<TransferSample>,
    pub max_laplacian_error: f64,
    pub max_residual_error: f64,
}

/// Options for [`residual_transfer`].
#[derive(Clone, Debug)]
pub struct TransferOptions {
    pub count: usize,
    pub seed: u64,
    /// Only points where `v ≥ floor·max v` are sampled.
    pub floor: f64,
    /// Difference steps as fractions of the grid spacing.
    pub lifted_step: f64,
    pub reduced_step: f64,
}

impl Default for TransferOptions {
    fn default() -> Self {
        Self {
            count: 100,
            seed: 0,
            floor: 0.25,
            lifted_step: 1.0 / 8.0,
            reduced_step: 1.0 / 4.0,
        }
    }
}

/// Compares the finite-difference residual of the lifted equation
/// `−Δu + au − |u|^{p−2}u` on `Ω` with `λ²` times the residual of the
/// reduced equation at random points of `Ω` above the field floor.
pub fn residual_transfer(
    lifted: &LiftedField,
    problem: &WeightedEllipticProblem,
    a: f64,
    model: &DilationModel,
    options: &TransferOptions,
) -> Result<ResidualTransfer> {
    let p = problem.exponent;
    let field_max = max_on_grid(lifted);
    ensure!(field_max > 0.0, Argument, "lifted field is identically zero");
    let h = lifted.interpolant_h();
    let bbox = problem.domain.bounding_box().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let f = |v: f64| v.abs().powf(p - 2.0) * v;
    let reduced = |x: &[f64]| lifted.reduced(x);
    let up = |z: &[f64]| lifted.eval_extended(z);
    let mut samples = Vec::with_capacity(options.count);
    let mut attempts = 0;
    while samples.len() < options.count {
        attempts += 1;
        ensure!(
            attempts < 10_000 * options.count.max(1),
            Argument,
            "could not find sample points above the field floor"
        );
        let x: Vec<f64> = bbox
            .min
            .iter()
            .zip(&bbox.max)
            .map(|(lo, hi)| rng.gen_range(*lo..*hi))
            .collect();
        if !problem.domain.inside(&x) || lifted.reduced(&x) < options.floor * field_max {
            continue;
        }
        let e = AlgebraElement::new(
            (0..lifted.algebra.dim())
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect(),
        )?;
        if e.norm() < 1e-3 {
            continue;
        }
        let z = hopf_section(&x, &e)?;
        let zc = z.coords();
        let image = hopf_map(&z);
        let lam2 = dilation_sq(&z, model);
        let lap_u = fd_laplacian(
            &up,
            &zc,
            options.lifted_step * h / zc.iter().map(|c| c.abs()).fold(1.0, f64::max),
        );
        let lap_v = fd_laplacian(&reduced, &image, options.reduced_step * h);
        let vx = lifted.reduced(&image);
        let q = (problem.coefficient)(&image);
        let c0 = (problem.linear_term)(&image);
        let r_u = -lap_u + a * vx - f(vx);
        let r_v = -lap_v + c0 * vx - q * f(vx);
        let scale = lap_v.abs() + (c0 * vx).abs() + (q * f(vx)).abs();
        samples.push(TransferSample {
            laplacian_error: (lap_u / (lam2 * lap_v) - 1.0).abs(),
            residual_error: (r_u - lam2 * r_v).abs() / (lam2 * scale),
            point: zc,
            image,
            dilation_sq: lam2,
            lifted_laplacian: lap_u,
            reduced_laplacian: lap_v,
            lifted_residual: r_u,
            reduced_residual: r_v,
        });
    }
    Ok(ResidualTransfer {
        max_laplacian_error: samples.iter().map(|s| s.laplacian_error).fold(0.0, f64::max),
        max_residual_error: samples.iter().map(|s| s.residual_error).fold(0.0, f64::max),
        samples,
    })
}

fn max_on_grid(lifted: &LiftedField) -> f64 {
    lifted.interpolant.max_node_value()
}

impl LiftedField {
    fn interpolant_h(&self) -> f64 {
        self.interpolant.h()
    }
}
