use std::sync::Arc;

use crate::error::{ensure, Error, Result};
use crate::geometry::ProfileDomain;

const OUTSIDE: u32 = u32::MAX;

/// A uniform box of nodes with an inside mask. Node `(i₀, …, i_{d−1})` sits
/// at `origin + h·i` and has box index `i₀ + n₀(i₁ + n₁ i₂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskedGrid {
    dim: usize,
    origin: Vec<f64>,
    h: f64,
    extents: Vec<usize>,
    inside_index: Vec<u32>,
    nodes: Vec<usize>,
}

impl MaskedGrid {
    /// A grid centred on the profile's bounding box with two layers of
    /// padding, so that every inside node has all `2d` neighbours.
    pub fn covering(profile: &ProfileDomain, h: f64) -> Result<Self> {
        ensure!(
            h > 0.0 && h.is_finite(),
            Argument,
            "grid spacing must be positive, got {h}"
        );
        let bbox = profile.bounding_box();
        let center = bbox.center();
        let mut extents = vec![];
        let mut origin = vec![];
        for (c, half) in center.iter().zip(bbox.half_widths()) {
            let n_half = (half / h).ceil() as usize + 2;
            extents.push(2 * n_half + 1);
            origin.push(c - n_half as f64 * h);
        }
        let inside = profile.inside_fn();
        Self::from_predicate(origin, h, extents, &*inside)
    }

    pub fn from_predicate(
        origin: Vec<f64>,
        h: f64,
        extents: Vec<usize>,
        inside: &dyn Fn(&[f64]) -> bool,
    ) -> Result<Self> {
        let dim = origin.len();
        ensure!(
            dim == 2 || dim == 3,
            Unsupported,
            "grids are 2-D or 3-D, got dimension {dim}"
        );
        ensure!(extents.len() == dim, Argument, "extents and origin differ in dimension");
        ensure!(
            extents.iter().all(|n| *n >= 3),
            Argument,
            "each extent must be at least 3"
        );
        let total: usize = extents.iter().product();
        ensure!(total < u32::MAX as usize, Argument, "grid too large");
        let mut grid = Self {
            dim,
            origin,
            h,
            extents,
            inside_index: vec![OUTSIDE; total],
            nodes: vec![],
        };
        let mut x = vec![0.0; dim];
        for id in 0..total {
            grid.coords_into(id, &mut x);
            let on_edge = grid
                .multi_index(id)
                .iter()
                .zip(&grid.extents)
                .any(|(i, n)| *i == 0 || *i == n - 1);
            if inside(&x) {
                if on_edge {
                    return Err(Error::Configuration("domain touches the edge of the grid box".into()));
                }
                grid.inside_index[id] = grid.nodes.len() as u32;
                grid.nodes.push(id);
            }
        }
        ensure!(
            !grid.nodes.is_empty(),
            Configuration,
            "no grid node lies inside the domain"
        );
        Ok(grid)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn box_len(&self) -> usize {
        self.inside_index.len()
    }

    pub fn inside_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Box index of the `i`-th inside node.
    pub fn node(&self, i: usize) -> usize {
        self.nodes[i]
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Inside index of a box node, if it is inside.
    pub fn inside_index(&self, id: usize) -> Option<usize> {
        match self.inside_index[id] {
            OUTSIDE => None,
            i => Some(i as usize),
        }
    }

    pub fn multi_index(&self, mut id: usize) -> Vec<usize> {
        self.extents
            .iter()
            .map(|n| {
                let i = id % n;
                id /= n;
                i
            })
            .collect()
    }

    pub fn box_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .rev()
            .zip(self.extents.iter().rev())
            .fold(0, |acc, (i, n)| acc * n + i)
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.extents[..axis].iter().product()
    }

    pub fn coords_into(&self, id: usize, out: &mut [f64]) {
        let mut rest = id;
        for ((o, &n), &x0) in out.iter_mut().zip(&self.extents).zip(&self.origin) {
            *o = x0 + self.h * (rest % n) as f64;
            rest /= n;
        }
    }

    pub fn coords(&self, id: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        self.coords_into(id, &mut x);
        x
    }

    /// Coordinates of the `i`-th inside node.
    pub fn inside_coords(&self, i: usize) -> Vec<f64> {
        self.coords(self.nodes[i])
    }

    /// Coordinate of the grid's central plane along `axis`.
    pub fn center(&self, axis: usize) -> f64 {
        self.origin[axis] + 0.5 * self.h * (self.extents[axis] - 1) as f64
    }

    /// Box index of the mirror image of `id` across the central plane
    /// orthogonal to `axis`.
    pub fn mirror(&self, id: usize, axis: usize) -> usize {
        let mut idx = self.multi_index(id);
        idx[axis] = self.extents[axis] - 1 - idx[axis];
        self.box_index(&idx)
    }

    /// Longest run of consecutive inside nodes along any grid line parallel
    /// to `axis`.
    pub fn longest_run(&self, axis: usize) -> usize {
        let stride = self.stride(axis);
        let n = self.extents[axis];
        let mut best = 0;
        for id in 0..self.box_len() {
            if !(id / stride).is_multiple_of(n) {
                continue;
            }
            let mut run = 0;
            for j in 0..n {
                if self.inside_index[id + j * stride] != OUTSIDE {
                    run += 1;
                    best = best.max(run);
                } else {
                    run = 0;
                }
            }
        }
        best
    }
}

/// Nodal values on the inside nodes of a grid; masked-out nodes carry zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Arc<MaskedGrid>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Arc<MaskedGrid>, values: Vec<f64>) -> Result<Self> {
        ensure!(
            values.len() == grid.inside_count(),
            Argument,
            "field has {} values for {} inside nodes",
            values.len(),
            grid.inside_count()
        );
        ensure!(
            values.iter().all(|v| v.is_finite()),
            Argument,
            "field values must be finite"
        );
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<MaskedGrid>) -> Self {
        let n = grid.inside_count();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn grid(&self) -> &Arc<MaskedGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Values on the whole box, zero outside the mask.
    pub fn box_values(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.box_len()];
        for (i, v) in self.values.iter().enumerate() {
            out[self.grid.node(i)] = *v;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_profile, ProfileShape};

    fn disk_grid(h: f64) -> MaskedGrid {
        let p = make_profile(
            ProfileShape::Ball {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
            None,
        )
        .unwrap();
        MaskedGrid::covering(&p, h).unwrap()
    }

    #[test]
    fn covering_grid_is_centred_and_padded() {
        let g = disk_grid(0.125);
        assert_eq!(g.extents(), &[21, 21]);
        assert!(g.center(0).abs() < 1e-15 && g.center(1).abs() < 1e-15);
        for i in 0..g.inside_count() {
            let idx = g.multi_index(g.node(i));
            assert!(idx.iter().zip(g.extents()).all(|(j, n)| *j > 0 && *j < n - 1));
        }
    }

    #[test]
    fn index_round_trip() {
        let g = disk_grid(0.25);
        for id in [0, 5, 17, g.box_len() - 1] {
            assert_eq!(g.box_index(&g.multi_index(id)), id);
        }
    }

    #[test]
    fn disk_mask_is_mirror_symmetric() {
        let g = disk_grid(1.0 / 32.0);
        for &id in g.nodes() {
            for axis in 0..2 {
                assert!(g.inside_index(g.mirror(id, axis)).is_some());
            }
        }
        assert_eq!(g.longest_run(0), 63);
    }
}
