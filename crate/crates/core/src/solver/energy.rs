use crate::error::{ensure, Result};
use crate::solver::grid::Field;
use crate::solver::operator::{dot, Discretization};

/// Energy and its gradient at a field.
#[derive(Clone, Debug)]
pub struct EnergyGradient {
    pub energy: f64,
    pub grad: Field,
}

/// `J(v) = h^d (½ vᵀAv − (1/p) Σ Q|v|^p)` and `∇J = h^d (Av − Q|v|^{p−2}v)`.
pub fn energy_and_gradient(field: &Field, disc: &Discretization) -> Result<EnergyGradient> {
    ensure!(
        **field.grid() == *disc.grid,
        Argument,
        "field does not live on the discretisation grid"
    );
    let v = field.values();
    let r = residual(v, disc);
    let vol = disc.grid.cell_volume();
    let energy = vol * (0.5 * disc.matrix.quadratic_form(v) - potential(v, disc) / disc.exponent);
    let grad = Field::new(field.grid().clone(), r.into_iter().map(|x| vol * x).collect())?;
    Ok(EnergyGradient { energy, grad })
}

/// `J(v)` alone.
pub fn energy(v: &[f64], disc: &Discretization) -> f64 {
    disc.grid.cell_volume() * (0.5 * disc.matrix.quadratic_form(v) - potential(v, disc) / disc.exponent)
}

/// `Σ Q|v|^p`.
pub(crate) fn potential(v: &[f64], disc: &Discretization) -> f64 {
    let p = disc.exponent;
    v.iter().zip(&disc.coefficient).map(|(x, q)| q * x.abs().powf(p)).sum()
}

/// Nodal residual `Av − Q|v|^{p−2}v` (no volume factor).
pub fn residual(v: &[f64], disc: &Discretization) -> Vec<f64> {
    let mut r = vec![0.0; v.len()];
    disc.matrix.apply(v, &mut r);
    let p = disc.exponent;
    for ((ri, x), q) in r.iter_mut().zip(v).zip(&disc.coefficient) {
        *ri -= q * x.abs().powf(p - 2.0) * x;
    }
    r
}

/// Scale `t*` maximising `t ↦ J(tv)`, or `None` for `v = 0`.
pub fn ray_maximiser(v: &[f64], disc: &Discretization) -> Option<f64> {
    let a = disc.matrix.quadratic_form(v);
    let b = potential(v, disc);
    (a > 0.0 && b > 0.0).then(|| (a / b).powf(1.0 / (disc.exponent - 2.0)))
}

/// `max_t J(tv)` in closed form.
pub fn ray_maximum(v: &[f64], disc: &Discretization) -> f64 {
    let p = disc.exponent;
    let a = disc.matrix.quadratic_form(v);
    let b = potential(v, disc);
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    disc.grid.cell_volume() * (0.5 - 1.0 / p) * (a.powf(p) / b.powi(2)).powf(1.0 / (p - 2.0))
}

pub(crate) fn inner(a: &[f64], b: &[f64]) -> f64 {
    dot(a, b)
}
