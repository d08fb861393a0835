use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::reduction::WeightedEllipticProblem;
use crate::solver::grid::MaskedGrid;

/// Minimum number of inside nodes along the longest grid line of each axis.
pub const MIN_RESOLUTION: usize = 8;
/// Floor on the cut fraction. A node at distance `θh` from the boundary is
/// held to `O(θ)` of its neighbours, so the floor must be far below `h`;
/// the large diagonal it produces is absorbed by the Jacobi preconditioner.
const MIN_FRACTION: f64 = 1e-6;
const FRACTION_BISECTIONS: usize = 40;

/// Symmetric sparse matrix in compressed-row form over the inside nodes.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    diag: Vec<f64>,
}

impl CsrMatrix {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().with_min_len(1024).enumerate().for_each(|(i, yi)| {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k] as usize];
            }
            *yi = s;
        });
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; x.len()];
        self.apply(x, &mut y);
        dot(x, &y)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        (self.row_ptr[i]..self.row_ptr[i + 1])
            .find(|k| self.cols[*k] as usize == j)
            .map_or(0.0, |k| self.vals[k])
    }
}

/// Deterministic sequential dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The discretised problem: stiffness `A` (including `c₀`), nodal `Q`, `c₀`.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub grid: Arc<MaskedGrid>,
    pub matrix: CsrMatrix,
    pub coefficient: Vec<f64>,
    pub linear_term: Vec<f64>,
    pub exponent: f64,
}

impl Discretization {
    pub fn len(&self) -> usize {
        self.matrix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    /// `Σ a|∇v|²` in grid units (no `h^d` factor, no `c₀` term).
    pub fn dirichlet_form(&self, v: &[f64]) -> f64 {
        let c0: f64 = v.iter().zip(&self.linear_term).map(|(x, c)| c * x * x).sum();
        self.matrix.quadratic_form(v) - c0
    }
}

/// Fraction `θ ∈ (0, 1]` of the segment `x → y` covered before leaving the
/// domain, `x` inside and `y` outside.
pub fn boundary_fraction(inside: &dyn Fn(&[f64]) -> bool, x: &[f64], y: &[f64]) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut z = x.to_vec();
    for _ in 0..FRACTION_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        for (k, zk) in z.iter_mut().enumerate() {
            *zk = x[k] + mid * (y[k] - x[k]);
        }
        if inside(&z) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).max(MIN_FRACTION)
}

/// Five/seven-point flux discretisation of `−div(a∇·) + c₀` with face weights
/// `(a_i + a_j)/2`. An arm that leaves the domain is cut at the boundary
/// (fraction `θ`) and contributes `a_face / (θh²)` to the diagonal, which
/// keeps the matrix symmetric and exact for linear profiles in 1-D.
pub fn assemble(problem: &WeightedEllipticProblem, grid: Arc<MaskedGrid>) -> Result<Discretization> {
    ensure!(
        grid.dim() == problem.dimension(),
        Argument,
        "grid dimension {} does not match problem dimension {}",
        grid.dim(),
        problem.dimension()
    );
    for axis in 0..grid.dim() {
        let run = grid.longest_run(axis);
        ensure!(
            run >= MIN_RESOLUTION,
            Configuration,
            "domain is under-resolved: {run} nodes across along axis {axis} (need {MIN_RESOLUTION})"
        );
    }
    let inside = problem.domain.inside_fn();
    let h2 = grid.h() * grid.h();
    let n = grid.inside_count();
    let d = grid.dim();

    // (off-diagonal entries, diagonal, Q, c₀) per inside node.
    type Row = (Vec<(u32, f64)>, f64, f64, f64);
    let rows: Vec<Row> = (0..n)
        .into_par_iter()
        .map(|i| {
            let id = grid.node(i);
            let x = grid.coords(id);
            let ax = (problem.weight)(&x);
            let mut diag = (problem.linear_term)(&x);
            let mut off = Vec::with_capacity(2 * d);
            for axis in 0..d {
                let stride = grid.stride(axis);
                for nb in [id - stride, id + stride] {
                    let y = grid.coords(nb);
                    match grid.inside_index(nb) {
                        Some(j) => {
                            let w = 0.5 * (ax + (problem.weight)(&y)) / h2;
                            diag += w;
                            off.push((j as u32, -w));
                        }
                        None => {
                            let theta = boundary_fraction(&*inside, &x, &y);
                            let xb: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + theta * (b - a)).collect();
                            let w = 0.5 * (ax + (problem.weight)(&xb)) / h2;
                            diag += w / theta;
                        }
                    }
                }
            }
            off.sort_by_key(|e| e.0);
            (off, diag, (problem.coefficient)(&x), (problem.linear_term)(&x))
        })
        .collect();

    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(n * (2 * d + 1));
    let mut vals = Vec::with_capacity(n * (2 * d + 1));
    let mut diag = Vec::with_capacity(n);
    let mut coefficient = Vec::with_capacity(n);
    let mut linear_term = Vec::with_capacity(n);
    row_ptr.push(0);
    for (i, (off, dg, q, c0)) in rows.into_iter().enumerate() {
        let mut placed = false;
        for (j, w) in off {
            if !placed && j as usize > i {
                cols.push(i as u32);
                vals.push(dg);
                placed = true;
            }
            cols.push(j);
            vals.push(w);
        }
        if !placed {
            cols.push(i as u32);
            vals.push(dg);
        }
        row_ptr.push(cols.len());
        diag.push(dg);
        ensure!(
            q > 0.0 && q.is_finite(),
            Domain,
            "coefficient is not positive at node {i}"
        );
        coefficient.push(q);
        linear_term.push(c0);
    }
    Ok(Discretization {
        grid,
        matrix: CsrMatrix {
            row_ptr,
            cols,
            vals,
            diag,
        },
        coefficient,
        linear_term,
        exponent: problem.exponent,
    })
}

/// Outcome of a conjugate-gradient solve.
#[derive(Clone, Copy, Debug)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

/// Jacobi-preconditioned conjugate gradients for `A x = b`, starting from
/// the contents of `x`.
pub fn pcg(a: &CsrMatrix, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> CgReport {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return CgReport {
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }
    let mut r = vec![0.0; n];
    a.apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&a.diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut rel = dot(&r, &r).sqrt() / bnorm;
    let mut it = 0;
    while rel > rel_tol && it < max_iter {
        a.apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / a.diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rel = dot(&r, &r).sqrt() / bnorm;
        it += 1;
    }
    CgReport {
        iterations: it,
        relative_residual: rel,
        converged: rel <= rel_tol,
    }
}

/// Preconditioned MINRES for a symmetric, possibly indefinite operator,
/// starting from the contents of `x`. `precond` is the diagonal of an SPD
/// preconditioner. The reported residual is the preconditioned-norm estimate
/// carried by the Lanczos recurrence, relative to its starting value.
pub fn minres<F>(op: F, precond: &[f64], b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> CgReport
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut r1 = vec![0.0; n];
    op(x, &mut r1);
    for i in 0..n {
        r1[i] = b[i] - r1[i];
    }
    let mut y: Vec<f64> = r1.iter().zip(precond).map(|(r, d)| r / d).collect();
    let beta1 = dot(&r1, &y).sqrt();
    if beta1 == 0.0 {
        return CgReport {
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }
    let mut r2 = r1.clone();
    let (mut oldb, mut beta) = (0.0, beta1);
    let (mut dbar, mut epsln, mut phibar) = (0.0, 0.0, beta1);
    let (mut cs, mut sn) = (-1.0f64, 0.0f64);
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut it = 0;
    let mut rel = 1.0;
    while rel > rel_tol && it < max_iter {
        it += 1;
        let s = 1.0 / beta;
        for i in 0..n {
            v[i] = s * y[i];
        }
        op(&v, &mut y);
        if it >= 2 {
            let c = beta / oldb;
            for i in 0..n {
                y[i] -= c * r1[i];
            }
        }
        let alfa = dot(&v, &y);
        let c = alfa / beta;
        for i in 0..n {
            y[i] -= c * r2[i];
        }
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        for i in 0..n {
            y[i] = r2[i] / precond[i];
        }
        oldb = beta;
        beta = dot(&r2, &y).max(0.0).sqrt();
        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;
        std::mem::swap(&mut w1, &mut w2);
        std::mem::swap(&mut w2, &mut w);
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
            x[i] += phi * w[i];
        }
        rel = phibar / beta1;
        if beta == 0.0 {
            break;
        }
    }
    CgReport {
        iterations: it,
        relative_residual: rel,
        converged: rel <= rel_tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_profile, ProfileShape};

    fn disk_problem() -> WeightedEllipticProblem {
        let p = make_profile(
            ProfileShape::Ball {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
            Some(64.0),
        )
        .unwrap();
        WeightedEllipticProblem::plain(p, 4.0).unwrap()
    }

    fn disc(h: f64) -> Discretization {
        let pr = disk_problem();
        let g = Arc::new(MaskedGrid::covering(&pr.domain, h).unwrap());
        assemble(&pr, g).unwrap()
    }

    #[test]
    fn matrix_is_symmetric_and_diagonally_dominant() {
        let d = disc(0.1);
        let a = &d.matrix;
        for i in 0..a.len() {
            let mut off = 0.0;
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                let j = a.cols[k] as usize;
                if j != i {
                    assert_eq!(a.vals[k], a.get(j, i));
                    off += a.vals[k].abs();
                }
            }
            assert!(a.diag[i] >= off - 1e-12);
        }
    }

    #[test]
    fn minres_solves_a_shifted_indefinite_laplacian() {
        // A − σI with σ between the first and second eigenvalues.
        let d = disc(1.0 / 16.0);
        let a = &d.matrix;
        let sigma = 10.0;
        let op = |x: &[f64], y: &mut [f64]| {
            a.apply(x, y);
            y.iter_mut().zip(x).for_each(|(y, x)| *y -= sigma * x);
        };
        let exact: Vec<f64> = (0..d.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = vec![0.0; d.len()];
        op(&exact, &mut b);
        let mut x = vec![0.0; d.len()];
        let rep = minres(op, a.diagonal(), &b, &mut x, 1e-12, 5000);
        assert!(rep.converged, "{rep:?}");
        let err = x.iter().zip(&exact).map(|(x, e)| (x - e).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn torsion_problem_converges_at_second_order() {
        // −Δu = 1 on the unit disk: u = (1 − |x|²)/4.
        let mut errs = vec![];
        for h in [1.0 / 16.0, 1.0 / 32.0] {
            let d = disc(h);
            let b = vec![1.0; d.len()];
            let mut u = vec![0.0; d.len()];
            assert!(pcg(&d.matrix, &b, &mut u, 1e-12, 5000).converged);
            let err = (0..d.len())
                .map(|i| {
                    let x = d.grid.inside_coords(i);
                    (u[i] - (1.0 - x[0] * x[0] - x[1] * x[1]) / 4.0).abs()
                })
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[1] < 2e-4, "{errs:?}");
        assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
    }

    #[test]
    fn cut_fraction() {
        let inside = |x: &[f64]| x[0] < 0.3;
        let t = boundary_fraction(&inside, &[0.0, 0.0], &[1.0, 0.0]);
        assert!((t - 0.3).abs() < 1e-9);
    }
}
