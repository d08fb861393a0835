use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::reduction::WeightedEllipticProblem;
use crate::solver::compactness_threshold;
use crate::solver::energy::{energy, inner, ray_maximiser, ray_maximum, residual};
use crate::solver::grid::{Field, MaskedGrid};
use crate::solver::operator::{assemble, minres, pcg, Discretization};

/// Smallest exponent the solver accepts is `2 + P_MARGIN`.
pub const P_MARGIN: f64 = 1e-3;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 40;
/// Switch to Newton steps once `sup|r| ≤ NEWTON_SWITCH·sup|Q|v|^{p−1}|`.
const NEWTON_SWITCH: f64 = 1e-3;
/// Descent steps taken after a rejected Newton step before trying again.
const NEWTON_COOLDOWN: usize = 10;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub h: f64,
    /// Stopping tolerance on `sup|∇J|`; `None` means `1e−8·h^d`.
    pub tolerance: Option<f64>,
    pub max_iterations: usize,
    pub seed: u64,
    /// Number of segments on the initial path `t ↦ t·e`.
    pub path_segments: usize,
    /// Relative tolerance of the inner conjugate-gradient solves.
    pub inner_tolerance: f64,
    /// Warm start; must live on the grid the solve builds.
    pub initial: Option<Field>,
    /// Restrict the search to fields even under each of these reflections.
    /// On domains with a continuous symmetry this pins down an otherwise
    /// degenerate family of rotated ground states.
    pub symmetries: Vec<Reflection>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            h: 1.0 / 64.0,
            tolerance: None,
            max_iterations: 500,
            seed: 0,
            path_segments: 64,
            inner_tolerance: 1e-3,
            initial: None,
            symmetries: Vec::new(),
        }
    }
}

impl SolverOptions {
    pub fn with_h(h: f64) -> Self {
        Self { h, ..Self::default() }
    }

    pub fn resolved_tolerance(&self, dim: usize) -> f64 {
        self.tolerance.unwrap_or(1e-8 * self.h.powi(dim as i32))
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub field: Field,
    /// `J` at the returned field.
    pub energy: f64,
    /// `sup |∇J|`, the gradient including the cell volume.
    pub gradient_norm: f64,
    /// `sup |Av − Q|v|^{p−2}v|`.
    pub residual_sup: f64,
    pub iterations: usize,
    pub converged: bool,
    pub exponent: f64,
    pub tolerance: f64,
}

/// The exported part of a [`SolveReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportJson {
    pub p: f64,
    pub energy: f64,
    pub gradient_norm: f64,
    pub residual_sup: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SolveReport {
    pub fn summary(&self) -> ReportJson {
        ReportJson {
            p: self.exponent,
            energy: self.energy,
            gradient_norm: self.gradient_norm,
            residual_sup: self.residual_sup,
            iterations: self.iterations,
            converged: self.converged,
        }
    }
}

/// A reflection `x_axis ↦ 2·plane − x_axis`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reflection {
    pub axis: usize,
    pub plane: f64,
}

struct Subspace {
    positive: bool,
    even: Vec<Vec<usize>>,
    odd: Option<Vec<usize>>,
}

impl Subspace {
    fn new(disc: &Discretization, options: &SolverOptions, odd: Option<Reflection>) -> Result<Self> {
        Ok(Self {
            positive: odd.is_none(),
            even: options
                .symmetries
                .iter()
                .map(|r| mirror_map(disc, *r))
                .collect::<Result<_>>()?,
            odd: odd.map(|r| mirror_map(disc, r)).transpose()?,
        })
    }

    fn project(&self, v: &mut [f64]) {
        if self.positive {
            v.iter_mut().for_each(|x| *x = x.abs());
        }
        for m in &self.even {
            project_even(v, m);
        }
        if let Some(m) = &self.odd {
            project_odd(v, m);
        }
    }
}

/// Least-energy positive solution by a ray-projected mountain pass.
///
/// Start from the path `t ↦ t·e` sampled at `path_segments` points (e is a
/// seeded positive bump), take its maximiser, then descend along the Sobolev
/// gradient `A⁻¹∇J` with an Armijo search on `w ↦ max_t J(tw)`, re-placing
/// the iterate at the top of its ray after every step. With step one this
/// is the normalised iteration `v ← t*·A⁻¹(Q|v|^{p−2}v)`. Once the residual
/// is small the descent hands over to Newton steps on `∇J = 0`, which the
/// linear-rate descent would otherwise need hundreds of iterations to match.
pub fn mountain_pass_solve(problem: &WeightedEllipticProblem, options: &SolverOptions) -> Result<SolveReport> {
    let disc = prepare(problem, options)?;
    let subspace = Subspace::new(&disc, options, None)?;
    let mut start = match &options.initial {
        Some(f) => checked_initial(f, &disc)?,
        None => bump(&disc, options.seed, None),
    };
    subspace.project(&mut start);
    descend(&disc, start, subspace, options)
}

/// Least-energy solution in the subspace of fields odd under `reflection`.
/// The domain, `a`, `Q` and `c₀` must be invariant under it.
pub fn sign_changing_solve(
    problem: &WeightedEllipticProblem,
    reflection: Reflection,
    options: &SolverOptions,
) -> Result<SolveReport> {
    let disc = prepare(problem, options)?;
    ensure!(
        !options.symmetries.contains(&reflection),
        Configuration,
        "a field cannot be both even and odd under the same reflection"
    );
    let subspace = Subspace::new(&disc, options, Some(reflection))?;
    let mut start = match &options.initial {
        Some(f) => checked_initial(f, &disc)?,
        None => bump(&disc, options.seed, Some(reflection)),
    };
    subspace.project(&mut start);
    ensure!(
        start.iter().any(|v| *v != 0.0),
        Configuration,
        "initial guess has no odd component"
    );
    descend(&disc, start, subspace, options)
}

/// Warm-started positive solves along an increasing list of exponents.
pub fn continuation_in_p(
    problem: &WeightedEllipticProblem,
    exponents: &[f64],
    options: &SolverOptions,
) -> Result<Vec<SolveReport>> {
    ensure!(!exponents.is_empty(), Argument, "exponent list is empty");
    ensure!(
        exponents.windows(2).all(|w| w[0] < w[1]),
        Argument,
        "exponent list must be strictly increasing"
    );
    let mut out: Vec<SolveReport> = Vec::with_capacity(exponents.len());
    for &p in exponents {
        let pr = problem.with_exponent(p)?;
        let mut opts = options.clone();
        if let Some(prev) = out.last() {
            opts.initial = Some(prev.field.clone());
        }
        out.push(mountain_pass_solve(&pr, &opts)?);
    }
    Ok(out)
}

/// Number of connected components of `{v > θ}` and `{v < −θ}` with
/// `θ = rel·sup|v|`, using axis neighbours.
pub fn nodal_domains(field: &Field, rel: f64) -> usize {
    let g = field.grid();
    let v = field.values();
    let thr = rel * field.sup_norm();
    let sign = |i: usize| -> i8 {
        if v[i] > thr {
            1
        } else if v[i] < -thr {
            -1
        } else {
            0
        }
    };
    let mut seen = vec![false; v.len()];
    let mut count = 0;
    let mut stack = vec![];
    for s in 0..v.len() {
        let sg = sign(s);
        if seen[s] || sg == 0 {
            continue;
        }
        count += 1;
        seen[s] = true;
        stack.push(s);
        while let Some(i) = stack.pop() {
            let id = g.node(i);
            for axis in 0..g.dim() {
                let stride = g.stride(axis);
                for nb in [id - stride, id + stride] {
                    if let Some(j) = g.inside_index(nb) {
                        if !seen[j] && sign(j) == sg {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
        }
    }
    count
}

fn prepare(problem: &WeightedEllipticProblem, options: &SolverOptions) -> Result<Discretization> {
    let p = problem.exponent;
    ensure!(
        p > 2.0 + P_MARGIN,
        Argument,
        "exponent {p} is too close to 2 (must exceed {})",
        2.0 + P_MARGIN
    );
    let d = problem.dimension();
    if let Some(threshold) = compactness_threshold(d) {
        ensure!(
            p < threshold,
            Hypothesis,
            "exponent {p} is not below the compactness threshold {threshold} in dimension {d}"
        );
    }
    ensure!(options.max_iterations > 0, Argument, "max_iterations must be positive");
    ensure!(options.path_segments >= 2, Argument, "path needs at least two segments");
    let grid = Arc::new(MaskedGrid::covering(&problem.domain, options.h)?);
    assemble(problem, grid)
}

fn checked_initial(f: &Field, disc: &Discretization) -> Result<Vec<f64>> {
    ensure!(
        **f.grid() == *disc.grid,
        Argument,
        "initial field lives on a different grid"
    );
    ensure!(f.sup_norm() > 0.0, Argument, "initial field is zero");
    Ok(f.values().to_vec())
}

/// Torsion function `A⁻¹1` with a small seeded multiplicative perturbation,
/// optionally multiplied by the signed distance to a reflection plane.
fn bump(disc: &Discretization, seed: u64, odd: Option<Reflection>) -> Vec<f64> {
    let n = disc.len();
    let mut e = vec![0.0; n];
    pcg(&disc.matrix, &vec![1.0; n], &mut e, 1e-8, 10 * n + 100);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (i, ei) in e.iter_mut().enumerate() {
        *ei = ei.abs() * (1.0 + 0.05 * rng.gen_range(-1.0..1.0));
        if let Some(r) = odd {
            *ei *= disc.grid.inside_coords(i)[r.axis] - r.plane;
        }
    }
    e
}

/// Inside index of each node's mirror image, after checking invariance.
fn mirror_map(disc: &Discretization, r: Reflection) -> Result<Vec<usize>> {
    let g = &disc.grid;
    ensure!(r.axis < g.dim(), Argument, "reflection axis {} out of range", r.axis);
    let scale = g.h() * g.extents()[r.axis] as f64;
    ensure!(
        (g.center(r.axis) - r.plane).abs() <= 1e-12 * scale.max(r.plane.abs()),
        Configuration,
        "reflection plane {} does not pass through the grid centre {}",
        r.plane,
        g.center(r.axis)
    );
    let diag = disc.matrix.diagonal();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let qmax = disc.coefficient.iter().cloned().fold(0.0, f64::max);
    let cmax = disc.linear_term.iter().cloned().fold(0.0, f64::max);
    let mut map = Vec::with_capacity(disc.len());
    for i in 0..disc.len() {
        let j = g
            .inside_index(g.mirror(g.node(i), r.axis))
            .ok_or_else(|| Error::Configuration("domain is not invariant under the reflection".into()))?;
        ensure!(
            (diag[i] - diag[j]).abs() <= 1e-8 * dmax
                && (disc.coefficient[i] - disc.coefficient[j]).abs() <= 1e-10 * qmax
                && (disc.linear_term[i] - disc.linear_term[j]).abs() <= 1e-10 * cmax.max(1.0),
            Configuration,
            "coefficients are not invariant under the reflection"
        );
        map.push(j);
    }
    Ok(map)
}

fn project_odd(v: &mut [f64], mirror: &[usize]) {
    for i in 0..v.len() {
        let j = mirror[i];
        if i < j {
            let odd = 0.5 * (v[i] - v[j]);
            v[i] = odd;
            v[j] = -odd;
        } else if i == j {
            v[i] = 0.0;
        }
    }
}

fn project_even(v: &mut [f64], mirror: &[usize]) {
    for i in 0..v.len() {
        let j = mirror[i];
        if i < j {
            let even = 0.5 * (v[i] + v[j]);
            v[i] = even;
            v[j] = even;
        }
    }
}

fn descend(disc: &Discretization, start: Vec<f64>, subspace: Subspace, options: &SolverOptions) -> Result<SolveReport> {
    let vol = disc.grid.cell_volume();
    let tol = options.resolved_tolerance(disc.grid.dim());
    let mut v = place_on_path(disc, start, options.path_segments)?;
    let n = v.len();
    let mut g = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    let mut cooldown = 0;
    let mut r;
    loop {
        r = residual(&v, disc);
        let gnorm = vol * sup(&r);
        if gnorm <= tol {
            converged = true;
            break;
        }
        if iterations >= options.max_iterations {
            break;
        }
        iterations += 1;

        if cooldown > 0 {
            cooldown -= 1;
        } else if sup(&r) <= NEWTON_SWITCH * nonlinear_scale(&v, disc) {
            if let Some(w) = newton_step(disc, &v, &r, &subspace, options.inner_tolerance) {
                v = w;
                continue;
            }
            cooldown = NEWTON_COOLDOWN;
        }

        g.iter_mut().for_each(|x| *x = 0.0);
        pcg(&disc.matrix, &r, &mut g, options.inner_tolerance, 10 * n + 100);
        let slope = vol * inner(&r, &g);
        let base = ray_maximum(&v, disc);
        let mut s = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let mut w: Vec<f64> = v.iter().zip(&g).map(|(a, b)| a - s * b).collect();
            subspace.project(&mut w);
            let value = ray_maximum(&w, disc);
            // Near convergence the predicted decrease is below rounding.
            if value <= base - ARMIJO * s * slope || slope <= 1e-14 * base.abs() {
                accepted = Some(w);
                break;
            }
            s *= 0.5;
        }
        let Some(mut w) = accepted else { break };
        let Some(t) = ray_maximiser(&w, disc) else {
            break;
        };
        w.iter_mut().for_each(|x| *x *= t);
        v = w;
    }
    let field = Field::new(disc.grid.clone(), v)?;
    let residual_sup = sup(&r);
    Ok(SolveReport {
        energy: energy(field.values(), disc),
        gradient_norm: vol * residual_sup,
        residual_sup,
        iterations,
        converged,
        exponent: disc.exponent,
        tolerance: tol,
        field,
    })
}

fn nonlinear_scale(v: &[f64], disc: &Discretization) -> f64 {
    let p = disc.exponent;
    v.iter()
        .zip(&disc.coefficient)
        .fold(0.0, |m, (x, q)| m.max(q * x.abs().powf(p - 1.0)))
}

/// `v − δ` with `J''(v)δ = r`, if it lowers `sup|r|`. The Hessian is
/// indefinite at a mountain-pass point, hence MINRES.
fn newton_step(disc: &Discretization, v: &[f64], r: &[f64], subspace: &Subspace, inner_tol: f64) -> Option<Vec<f64>> {
    let p = disc.exponent;
    let n = v.len();
    let shift: Vec<f64> = v
        .iter()
        .zip(&disc.coefficient)
        .map(|(x, q)| (p - 1.0) * q * x.abs().powf(p - 2.0))
        .collect();
    let op = |x: &[f64], y: &mut [f64]| {
        disc.matrix.apply(x, y);
        for i in 0..x.len() {
            y[i] -= shift[i] * x[i];
        }
    };
    let mut delta = vec![0.0; n];
    // Newton converges quadratically only if the linear solve keeps pace.
    let tol = (inner_tol * 1e-4).max(1e-12);
    minres(op, disc.matrix.diagonal(), r, &mut delta, tol, 10 * n + 100);
    let mut w: Vec<f64> = v.iter().zip(&delta).map(|(a, b)| a - b).collect();
    subspace.project(&mut w);
    (w.iter().all(|x| x.is_finite()) && sup(&residual(&w, disc)) < sup(r)).then_some(w)
}

/// Sample `J` along `t ↦ t·e` for `t ∈ [0, t_e]`, with `t_e` past the well
/// (`J(t_e e) < 0`), and return the field at the exact maximiser on the ray
/// through the best sample.
fn place_on_path(disc: &Discretization, mut e: Vec<f64>, segments: usize) -> Result<Vec<f64>> {
    let s = sup(&e);
    ensure!(s > 0.0 && s.is_finite(), Argument, "initial field is zero");
    e.iter_mut().for_each(|x| *x /= s);
    let scaled = |t: f64| -> Vec<f64> { e.iter().map(|x| t * x).collect() };
    let mut te = 1.0;
    let mut doublings = 0;
    while energy(&scaled(te), disc) >= 0.0 {
        te *= 2.0;
        doublings += 1;
        ensure!(
            doublings < 200,
            NotConverged,
            "energy stays non-negative along the initial ray"
        );
    }
    let best = (1..=segments)
        .map(|j| te * j as f64 / segments as f64)
        .map(|t| (t, energy(&scaled(t), disc)))
        .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let base = scaled(best.0);
    let t = ray_maximiser(&base, disc).ok_or_else(|| Error::NotConverged("degenerate initial ray".into()))?;
    Ok(base.into_iter().map(|x| t * x).collect())
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
