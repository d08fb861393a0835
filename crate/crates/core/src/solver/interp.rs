use serde::{Deserialize, Serialize};

use crate::solver::grid::{Field, MaskedGrid};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Bi/trilinear on the box, zero outside the mask. Continuous only.
    #[default]
    Linear,
    /// Cubic B-spline interpolating the box values; `C²`, so second
    /// differences of the interpolant are meaningful.
    CubicSpline,
    /// Tensor 4-point Lagrange on the surrounding 4^d nodes; exact for
    /// cubics, meant for points at least two cells inside the mask.
    LocalCubic,
}

/// Continuous extension of a [`Field`] to the whole grid box.
#[derive(Clone, Debug)]
pub struct GridInterpolant {
    grid: Arc<MaskedGrid>,
    kind: Interpolation,
    coeffs: Vec<f64>,
    nodal_max: f64,
}

impl GridInterpolant {
    pub fn new(field: &Field, kind: Interpolation) -> Self {
        let grid = field.grid().clone();
        let nodal_max = field.max();
        let mut coeffs = field.box_values();
        if kind == Interpolation::CubicSpline {
            for axis in 0..grid.dim() {
                prefilter(&grid, axis, &mut coeffs);
            }
        }
        Self {
            grid,
            kind,
            coeffs,
            nodal_max,
        }
    }

    pub fn h(&self) -> f64 {
        self.grid.h()
    }

    /// Largest nodal value of the interpolated field.
    pub fn max_node_value(&self) -> f64 {
        self.nodal_max
    }

    pub fn kind(&self) -> Interpolation {
        self.kind
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let g = &self.grid;
        let d = g.dim();
        let mut base = [0isize; 3];
        let mut frac = [0.0; 3];
        for a in 0..d {
            let u = (x[a] - g.origin()[a]) / g.h();
            let n = g.extents()[a] as f64;
            if !(0.0..=n - 1.0).contains(&u) {
                return 0.0;
            }
            let i = u.floor().min(n - 2.0);
            base[a] = i as isize;
            frac[a] = u - i;
        }
        match self.kind {
            Interpolation::Linear => self.tensor_sum(
                d,
                &base,
                |a, o| {
                    let t = frac[a];
                    match o {
                        0 => 1.0 - t,
                        1 => t,
                        _ => 0.0,
                    }
                },
                0..=1,
            ),
            Interpolation::CubicSpline => self.tensor_sum(d, &base, |a, o| bspline3(frac[a] - o as f64), -1..=2),
            Interpolation::LocalCubic => self.tensor_sum(d, &base, |a, o| lagrange4(frac[a], o), -1..=2),
        }
    }

    fn tensor_sum(
        &self,
        d: usize,
        base: &[isize; 3],
        weight: impl Fn(usize, isize) -> f64,
        offsets: std::ops::RangeInclusive<isize>,
    ) -> f64 {
        let g = &self.grid;
        let ext = g.extents();
        let offs: Vec<isize> = offsets.collect();
        let k = offs.len();
        let mut total = 0.0;
        for combo in 0..k.pow(d as u32) {
            let mut c = combo;
            let mut w = 1.0;
            let mut id = 0usize;
            let mut stride = 1usize;
            let mut valid = true;
            for a in 0..d {
                let o = offs[c % k];
                c /= k;
                let i = base[a] + o;
                if i < 0 || i >= ext[a] as isize {
                    valid = false;
                    break;
                }
                w *= weight(a, o);
                id += i as usize * stride;
                stride *= ext[a];
            }
            if valid && w != 0.0 {
                total += w * self.coeffs[id];
            }
        }
        total
    }
}

fn bspline3(t: f64) -> f64 {
    let a = t.abs();
    if a < 1.0 {
        2.0 / 3.0 - a * a + 0.5 * a * a * a
    } else if a < 2.0 {
        (2.0 - a).powi(3) / 6.0
    } else {
        0.0
    }
}

fn lagrange4(t: f64, o: isize) -> f64 {
    match o {
        -1 => -t * (t - 1.0) * (t - 2.0) / 6.0,
        0 => (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        1 => -(t + 1.0) * t * (t - 2.0) / 2.0,
        2 => (t + 1.0) * t * (t - 1.0) / 6.0,
        _ => 0.0,
    }
}

/// Solve `(c_{i−1} + 4c_i + c_{i+1})/6 = f_i` along every line parallel to
/// `axis`, with `c = 0` beyond the box (Thomas algorithm).
fn prefilter(g: &MaskedGrid, axis: usize, data: &mut [f64]) {
    let n = g.extents()[axis];
    let stride = g.stride(axis);
    let (sub, diag) = (1.0 / 6.0, 4.0 / 6.0);
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    for id in 0..data.len() {
        if !(id / stride).is_multiple_of(n) {
            continue;
        }
        let at = |j: usize| id + j * stride;
        cp[0] = sub / diag;
        dp[0] = data[at(0)] / diag;
        for j in 1..n {
            let m = diag - sub * cp[j - 1];
            cp[j] = sub / m;
            dp[j] = (data[at(j)] - sub * dp[j - 1]) / m;
        }
        data[at(n - 1)] = dp[n - 1];
        for j in (0..n - 1).rev() {
            data[at(j)] = dp[j] - cp[j] * data[at(j + 1)];
        }
    }
}
