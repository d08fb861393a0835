use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Strict-inequality slack for profiles with analytically exact normals.
pub const TOL_GEO_EXACT: f64 = 1e-9;
/// Strict-inequality slack for polygonal approximations.
pub const TOL_GEO_POLYGON: f64 = 1e-4;
/// Boundary samples per unit length of a curve.
pub const DEFAULT_DENSITY_2D: f64 = 256.0;
/// Boundary samples per unit area of a surface (32 × 32).
pub const DEFAULT_DENSITY_3D: f64 = 1024.0;

const MAX_SAMPLES_HIGH_DIM: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub point: Vec<f64>,
    /// Outward unit normal.
    pub normal: Vec<f64>,
    /// Surface measure carried by the sample.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl BoundingBox {
    pub fn center(&self) -> Vec<f64> {
        self.min.iter().zip(&self.max).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn half_widths(&self) -> Vec<f64> {
        self.min.iter().zip(&self.max).map(|(a, b)| 0.5 * (b - a)).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.min
            .iter()
            .zip(&self.max)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }
}

/// Generator parameters. Serialized with a `kind` tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileShape {
    /// Ball in any dimension ≥ 2.
    Ball { center: Vec<f64>, radius: f64 },
    /// Spherical shell `inner < |x − center| < outer`.
    Shell {
        center: Vec<f64>,
        inner_radius: f64,
        outer_radius: f64,
    },
    /// Planar sector of an annulus, symmetric about the first axis through
    /// `center`: `inner < r < outer`, `|angle| < half_angle`.
    AnnulusSector {
        center: Vec<f64>,
        inner_radius: f64,
        outer_radius: f64,
        half_angle: f64,
    },
    /// Two balls of equal radius centred on the first axis joined by a thin
    /// neck (a slab in 2-D, a cylinder in 3-D).
    Dumbbell {
        dimension: usize,
        first_center: f64,
        second_center: f64,
        radius: f64,
        neck_half_width: f64,
    },
    /// Simple planar polygon.
    Polygon { vertices: Vec<[f64; 2]> },
}

impl ProfileShape {
    pub fn kind(&self) -> &'static str {
        match self {
            ProfileShape::Ball { .. } => "ball",
            ProfileShape::Shell { .. } => "shell",
            ProfileShape::AnnulusSector { .. } => "annulus_sector",
            ProfileShape::Dumbbell { .. } => "dumbbell",
            ProfileShape::Polygon { .. } => "polygon",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ProfileShape::Ball { center, .. } | ProfileShape::Shell { center, .. } => center.len(),
            ProfileShape::AnnulusSector { .. } | ProfileShape::Polygon { .. } => 2,
            ProfileShape::Dumbbell { dimension, .. } => *dimension,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ProfileShape::Ball { center, radius } => {
                ensure!(center.len() >= 2, Argument, "ball needs dimension ≥ 2");
                ensure!(*radius > 0.0, Argument, "ball radius must be positive");
            }
            ProfileShape::Shell {
                center,
                inner_radius,
                outer_radius,
            } => {
                ensure!(
                    center.len() == 2 || center.len() == 3,
                    Argument,
                    "shell needs dimension 2 or 3"
                );
                ensure!(
                    0.0 < *inner_radius && inner_radius < outer_radius,
                    Argument,
                    "shell radii must satisfy 0 < inner < outer"
                );
            }
            ProfileShape::AnnulusSector {
                center,
                inner_radius,
                outer_radius,
                half_angle,
            } => {
                ensure!(center.len() == 2, Argument, "annulus sector is planar");
                ensure!(
                    0.0 < *inner_radius && inner_radius < outer_radius,
                    Argument,
                    "sector radii must satisfy 0 < inner < outer"
                );
                ensure!(
                    0.0 < *half_angle && *half_angle < PI,
                    Argument,
                    "sector half angle must lie in (0, π)"
                );
            }
            ProfileShape::Dumbbell {
                dimension,
                first_center,
                second_center,
                radius,
                neck_half_width,
            } => {
                ensure!(
                    *dimension == 2 || *dimension == 3,
                    Argument,
                    "dumbbell needs dimension 2 or 3"
                );
                ensure!(*radius > 0.0, Argument, "dumbbell radius must be positive");
                ensure!(
                    second_center - first_center > 2.0 * radius,
                    Argument,
                    "dumbbell balls must be disjoint"
                );
                ensure!(
                    0.0 < *neck_half_width && neck_half_width < radius,
                    Argument,
                    "neck half width must lie in (0, radius)"
                );
            }
            ProfileShape::Polygon { vertices } => {
                ensure!(vertices.len() >= 3, Argument, "polygon needs at least 3 vertices");
                ensure!(signed_area(vertices).abs() > 0.0, Argument, "degenerate polygon");
            }
        }
        Ok(())
    }

    /// Membership of the open domain.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ProfileShape::Ball { center, radius } => dist(x, center) < *radius,
            ProfileShape::Shell {
                center,
                inner_radius,
                outer_radius,
            } => {
                let r = dist(x, center);
                *inner_radius < r && r < *outer_radius
            }
            ProfileShape::AnnulusSector {
                center,
                inner_radius,
                outer_radius,
                half_angle,
            } => {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                let r = dx.hypot(dy);
                *inner_radius < r && r < *outer_radius && dy.atan2(dx).abs() < *half_angle
            }
            ProfileShape::Dumbbell {
                first_center,
                second_center,
                radius,
                neck_half_width,
                ..
            } => {
                let lateral = x[1..].iter().map(|c| c * c).sum::<f64>().sqrt();
                let in_ball = |c: f64| ((x[0] - c).powi(2) + lateral * lateral).sqrt() < *radius;
                in_ball(*first_center)
                    || in_ball(*second_center)
                    || (x[0] > *first_center && x[0] < *second_center && lateral < *neck_half_width)
            }
            ProfileShape::Polygon { vertices } => point_in_polygon(vertices, x),
        }
    }

    fn bounding_box(&self) -> BoundingBox {
        match self {
            ProfileShape::Ball { center, radius }
            | ProfileShape::Shell {
                center,
                outer_radius: radius,
                ..
            } => BoundingBox {
                min: center.iter().map(|c| c - radius).collect(),
                max: center.iter().map(|c| c + radius).collect(),
            },
            ProfileShape::AnnulusSector {
                center,
                inner_radius,
                outer_radius,
                half_angle,
            } => {
                let mut pts = vec![];
                for r in [*inner_radius, *outer_radius] {
                    for a in [-*half_angle, *half_angle] {
                        pts.push([r * a.cos(), r * a.sin()]);
                    }
                }
                for a in [0.0, PI / 2.0, -PI / 2.0, PI] {
                    if a.abs() <= *half_angle {
                        pts.push([outer_radius * a.cos(), outer_radius * a.sin()]);
                    }
                }
                let fold =
                    |i: usize, f: fn(f64, f64) -> f64, init: f64| pts.iter().map(|p| p[i]).fold(init, f) + center[i];
                BoundingBox {
                    min: vec![fold(0, f64::min, f64::INFINITY), fold(1, f64::min, f64::INFINITY)],
                    max: vec![
                        fold(0, f64::max, f64::NEG_INFINITY),
                        fold(1, f64::max, f64::NEG_INFINITY),
                    ],
                }
            }
            ProfileShape::Dumbbell {
                dimension,
                first_center,
                second_center,
                radius,
                ..
            } => {
                let mut min = vec![-radius; *dimension];
                let mut max = vec![*radius; *dimension];
                min[0] = first_center - radius;
                max[0] = second_center + radius;
                BoundingBox { min, max }
            }
            ProfileShape::Polygon { vertices } => BoundingBox {
                min: vec![
                    vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min),
                    vertices.iter().map(|v| v[1]).fold(f64::INFINITY, f64::min),
                ],
                max: vec![
                    vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max),
                    vertices.iter().map(|v| v[1]).fold(f64::NEG_INFINITY, f64::max),
                ],
            },
        }
    }

    fn tol_geo(&self) -> f64 {
        match self {
            ProfileShape::Polygon { .. } => TOL_GEO_POLYGON,
            _ => TOL_GEO_EXACT,
        }
    }

    fn sample(&self, density: f64) -> Vec<BoundarySample> {
        match self {
            ProfileShape::Ball { center, radius } => sphere_samples(center, *radius, density, 1.0),
            ProfileShape::Shell {
                center,
                inner_radius,
                outer_radius,
            } => {
                let mut s = sphere_samples(center, *outer_radius, density, 1.0);
                s.extend(sphere_samples(center, *inner_radius, density, -1.0));
                s
            }
            ProfileShape::AnnulusSector {
                center,
                inner_radius,
                outer_radius,
                half_angle,
            } => sector_samples(center, *inner_radius, *outer_radius, *half_angle, density),
            ProfileShape::Dumbbell {
                dimension,
                first_center,
                second_center,
                radius,
                neck_half_width,
            } => dumbbell_samples(
                *dimension,
                *first_center,
                *second_center,
                *radius,
                *neck_half_width,
                density,
            ),
            ProfileShape::Polygon { vertices } => polygon_samples(vertices, density),
        }
    }
}

/// A generator domain Θ: membership predicate plus sampled boundary with
/// outward normals and quadrature weights.
/// Shared membership test of an open domain.
pub type InsideFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Clone)]
pub struct ProfileDomain {
    shape: ProfileShape,
    density: f64,
    samples: Vec<BoundarySample>,
    bbox: BoundingBox,
    inside: InsideFn,
}

impl fmt::Debug for ProfileDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfileDomain")
            .field("shape", &self.shape)
            .field("density", &self.density)
            .field("samples", &self.samples.len())
            .finish()
    }
}

/// Builds a profile at the given sampling density (samples per unit length
/// in 2-D, per unit area in 3-D). `None` picks the default density.
pub fn make_profile(shape: ProfileShape, density: Option<f64>) -> Result<ProfileDomain> {
    shape.validate()?;
    let dim = shape.dimension();
    let density = density.unwrap_or(if dim == 2 {
        DEFAULT_DENSITY_2D
    } else {
        DEFAULT_DENSITY_3D
    });
    ensure!(density > 0.0, Argument, "sampling density must be positive");
    let samples = shape.sample(density);
    let bbox = shape.bounding_box();
    let predicate = shape.clone();
    Ok(ProfileDomain {
        shape,
        density,
        samples,
        bbox,
        inside: Arc::new(move |x| predicate.contains(x)),
    })
}

impl ProfileDomain {
    pub fn dimension(&self) -> usize {
        self.shape.dimension()
    }

    pub fn shape(&self) -> &ProfileShape {
        &self.shape
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn samples(&self) -> &[BoundarySample] {
        &self.samples
    }

    pub fn bounding_box(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn tol_geo(&self) -> f64 {
        self.shape.tol_geo()
    }

    pub fn inside(&self, x: &[f64]) -> bool {
        (self.inside)(x)
    }

    pub fn inside_fn(&self) -> InsideFn {
        self.inside.clone()
    }

    /// Total boundary measure according to the quadrature weights.
    pub fn boundary_measure(&self) -> f64 {
        self.samples.iter().map(|s| s.weight).sum()
    }

    /// Same domain, resampled at `factor` times the density.
    pub fn refined(&self, factor: f64) -> Result<ProfileDomain> {
        make_profile(self.shape.clone(), Some(self.density * factor))
    }

    /// Rigid motion of the samples by `x ↦ x + shift`. The predicate is
    /// shifted accordingly; the generator parameters are updated when the
    /// shape has an explicit centre.
    pub fn translated(&self, shift: &[f64]) -> Result<ProfileDomain> {
        ensure!(shift.len() == self.dimension(), Argument, "shift dimension mismatch");
        let moved = |p: &[f64]| p.iter().zip(shift).map(|(a, b)| a + b).collect::<Vec<_>>();
        let shape = match &self.shape {
            ProfileShape::Ball { center, radius } => ProfileShape::Ball {
                center: moved(center),
                radius: *radius,
            },
            ProfileShape::Shell {
                center,
                inner_radius,
                outer_radius,
            } => ProfileShape::Shell {
                center: moved(center),
                inner_radius: *inner_radius,
                outer_radius: *outer_radius,
            },
            ProfileShape::AnnulusSector {
                center,
                inner_radius,
                outer_radius,
                half_angle,
            } => ProfileShape::AnnulusSector {
                center: moved(center),
                inner_radius: *inner_radius,
                outer_radius: *outer_radius,
                half_angle: *half_angle,
            },
            ProfileShape::Polygon { vertices } => ProfileShape::Polygon {
                vertices: vertices.iter().map(|v| [v[0] + shift[0], v[1] + shift[1]]).collect(),
            },
            ProfileShape::Dumbbell { .. } => return Err(Error::Unsupported("dumbbells are axis-anchored".into())),
        };
        make_profile(shape, Some(self.density))
    }

    /// Applies `map` to every boundary point and normal, keeping weights and
    /// the generator. Used to test invariance of the predicates under
    /// isometries that fix the first axis.
    pub fn with_transformed_samples(&self, map: impl Fn(&[f64]) -> Vec<f64>) -> ProfileDomain {
        let mut out = self.clone();
        for s in &mut out.samples {
            let origin = vec![0.0; s.point.len()];
            let image_origin = map(&origin);
            s.point = map(&s.point);
            s.normal = map(&s.normal).iter().zip(&image_origin).map(|(a, b)| a - b).collect();
        }
        out
    }

    /// Grid points of the bounding box lying in the domain, `per_axis`
    /// points along each axis.
    pub fn interior_samples(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let d = self.dimension();
        let per_axis = per_axis.max(2);
        let mut out = vec![];
        let mut idx = vec![0usize; d];
        loop {
            let x: Vec<f64> = (0..d)
                .map(|a| {
                    let t = (idx[a] as f64 + 0.5) / per_axis as f64;
                    self.bbox.min[a] + t * (self.bbox.max[a] - self.bbox.min[a])
                })
                .collect();
            if self.inside(&x) {
                out.push(x);
            }
            let mut a = 0;
            while a < d {
                idx[a] += 1;
                if idx[a] < per_axis {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if a == d {
                break;
            }
        }
        out
    }

    pub fn to_json(&self) -> ProfileJson {
        let mut parameters = serde_json::to_value(&self.shape).expect("shape serializes");
        if let Some(map) = parameters.as_object_mut() {
            map.remove("kind");
        }
        ProfileJson {
            dimension: self.dimension(),
            kind: self.shape.kind().to_string(),
            density: self.density,
            parameters,
            samples: self.samples.clone(),
        }
    }

    /// Rebuilds a profile from its JSON record. The membership predicate
    /// comes from the generator parameters; the samples are taken verbatim.
    pub fn from_json(json: &ProfileJson) -> Result<ProfileDomain> {
        let mut tagged = json.parameters.clone();
        let map = tagged
            .as_object_mut()
            .ok_or_else(|| Error::Argument("profile parameters must be an object".into()))?;
        map.insert("kind".into(), serde_json::Value::String(json.kind.clone()));
        let shape: ProfileShape =
            serde_json::from_value(tagged).map_err(|e| Error::Argument(format!("profile parameters: {e}")))?;
        ensure!(
            shape.dimension() == json.dimension,
            Argument,
            "profile dimension {} does not match its parameters ({})",
            json.dimension,
            shape.dimension()
        );
        let mut profile = make_profile(shape, Some(json.density))?;
        for s in &json.samples {
            ensure!(
                s.point.len() == json.dimension && s.normal.len() == json.dimension,
                Argument,
                "sample dimension mismatch"
            );
            let n = s.normal.iter().map(|c| c * c).sum::<f64>().sqrt();
            ensure!((n - 1.0).abs() <= 1e-10, Argument, "sample normal is not unit ({n})");
            ensure!(s.weight > 0.0, Argument, "sample weight must be positive");
        }
        profile.samples = json.samples.clone();
        Ok(profile)
    }
}

/// On-disk profile record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileJson {
    pub dimension: usize,
    pub kind: String,
    pub density: f64,
    pub parameters: serde_json::Value,
    pub samples: Vec<BoundarySample>,
}

fn dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Samples of the sphere `|x − c| = r`; `orientation = −1` flips normals
/// (inner boundary of a shell).
fn sphere_samples(center: &[f64], r: f64, density: f64, orientation: f64) -> Vec<BoundarySample> {
    match center.len() {
        2 => {
            let n = ((2.0 * PI * r * density).ceil() as usize).max(8);
            let w = 2.0 * PI * r / n as f64;
            (0..n)
                .map(|j| {
                    let a = 2.0 * PI * j as f64 / n as f64;
                    let (s, c) = a.sin_cos();
                    BoundarySample {
                        point: vec![center[0] + r * c, center[1] + r * s],
                        normal: vec![orientation * c, orientation * s],
                        weight: w,
                    }
                })
                .collect()
        }
        3 => {
            // Rings of constant polar angle measured from the first axis, so
            // the two axis points are the poles.
            let lin = density.sqrt();
            let n_theta = ((PI * r * lin).ceil() as usize).max(4);
            let dt = PI / n_theta as f64;
            let mut out = vec![];
            for i in 0..n_theta {
                let (ta, tb) = (i as f64 * dt, (i + 1) as f64 * dt);
                let theta = 0.5 * (ta + tb);
                let n_phi = ((2.0 * PI * r * theta.sin() * lin).ceil() as usize).max(4);
                let ring_area = 2.0 * PI * r * r * (ta.cos() - tb.cos());
                let w = ring_area / n_phi as f64;
                for j in 0..n_phi {
                    let phi = 2.0 * PI * (j as f64 + 0.5 * (i % 2) as f64) / n_phi as f64;
                    let nrm = [theta.cos(), theta.sin() * phi.cos(), theta.sin() * phi.sin()];
                    out.push(BoundarySample {
                        point: (0..3).map(|a| center[a] + r * nrm[a]).collect(),
                        normal: nrm.iter().map(|c| orientation * c).collect(),
                        weight: w,
                    });
                }
            }
            out
        }
        d => {
            // Seeded Gaussian directions; equal weights.
            let area = sphere_area(d) * r.powi(d as i32 - 1);
            let n = ((area * density) as usize).clamp(64, MAX_SAMPLES_HIGH_DIM);
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + d as u64);
            (0..n)
                .map(|_| {
                    let g: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                    let len = g.iter().map(|c| c * c).sum::<f64>().sqrt();
                    let nrm: Vec<f64> = g.iter().map(|c| c / len).collect();
                    BoundarySample {
                        point: (0..d).map(|a| center[a] + r * nrm[a]).collect(),
                        normal: nrm.iter().map(|c| orientation * c).collect(),
                        weight: area / n as f64,
                    }
                })
                .collect()
        }
    }
}

/// Surface area of the unit sphere in `ℝ^d`.
fn sphere_area(d: usize) -> f64 {
    // |S^{d-1}| = 2π^{d/2}/Γ(d/2), via the recursion |S^{d+1}| = 2π/d |S^{d-1}|.
    let (mut area, mut k) = if d.is_multiple_of(2) {
        (2.0 * PI, 2)
    } else {
        (4.0 * PI, 3)
    };
    while k < d {
        area *= 2.0 * PI / k as f64;
        k += 2;
    }
    area
}

fn segment_samples(a: [f64; 2], b: [f64; 2], normal: [f64; 2], density: f64, out: &mut Vec<BoundarySample>) {
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    let n = ((len * density).ceil() as usize).max(1);
    let w = len / n as f64;
    for j in 0..n {
        let t = (j as f64 + 0.5) / n as f64;
        out.push(BoundarySample {
            point: vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])],
            normal: normal.to_vec(),
            weight: w,
        });
    }
}

fn arc_samples(c: &[f64], r: f64, from: f64, to: f64, orientation: f64, density: f64, out: &mut Vec<BoundarySample>) {
    let len = r * (to - from);
    let n = ((len * density).ceil() as usize).max(2);
    let w = len / n as f64;
    for j in 0..n {
        let a = from + (to - from) * (j as f64 + 0.5) / n as f64;
        let (s, co) = a.sin_cos();
        out.push(BoundarySample {
            point: vec![c[0] + r * co, c[1] + r * s],
            normal: vec![orientation * co, orientation * s],
            weight: w,
        });
    }
}

fn sector_samples(c: &[f64], r0: f64, r1: f64, alpha: f64, density: f64) -> Vec<BoundarySample> {
    let mut out = vec![];
    arc_samples(c, r1, -alpha, alpha, 1.0, density, &mut out);
    arc_samples(c, r0, -alpha, alpha, -1.0, density, &mut out);
    let (s, co) = alpha.sin_cos();
    let at = |r: f64, sgn: f64| [c[0] + r * co, c[1] + sgn * r * s];
    segment_samples(at(r0, 1.0), at(r1, 1.0), [-s, co], density, &mut out);
    segment_samples(at(r0, -1.0), at(r1, -1.0), [-s, -co], density, &mut out);
    out
}

fn dumbbell_samples(dim: usize, a: f64, b: f64, r: f64, w: f64, density: f64) -> Vec<BoundarySample> {
    // The neck meets each sphere where the lateral distance equals w.
    let cut = (r * r - w * w).sqrt();
    let (neck_from, neck_to) = (a + cut, b - cut);
    let keep = |p: &[f64]| {
        let lateral = p[1..].iter().map(|c| c * c).sum::<f64>().sqrt();
        !(lateral < w && p[0] > a && p[0] < b)
    };
    let mut out: Vec<BoundarySample> = vec![];
    let mut centre = vec![0.0; dim];
    for c in [a, b] {
        centre[0] = c;
        out.extend(
            sphere_samples(&centre, r, density, 1.0)
                .into_iter()
                .filter(|s| keep(&s.point)),
        );
    }
    if dim == 2 {
        segment_samples([neck_from, w], [neck_to, w], [0.0, 1.0], density, &mut out);
        segment_samples([neck_from, -w], [neck_to, -w], [0.0, -1.0], density, &mut out);
    } else {
        let lin = density.sqrt();
        let len = neck_to - neck_from;
        let n_axis = ((len * lin).ceil() as usize).max(1);
        let n_phi = ((2.0 * PI * w * lin).ceil() as usize).max(8);
        let weight = len * 2.0 * PI * w / (n_axis * n_phi) as f64;
        for i in 0..n_axis {
            let t = neck_from + len * (i as f64 + 0.5) / n_axis as f64;
            for j in 0..n_phi {
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                let (s, co) = phi.sin_cos();
                out.push(BoundarySample {
                    point: vec![t, w * co, w * s],
                    normal: vec![0.0, co, s],
                    weight,
                });
            }
        }
    }
    out
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (p, q) = (v[i], v[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

fn polygon_samples(vertices: &[[f64; 2]], density: f64) -> Vec<BoundarySample> {
    let mut v = vertices.to_vec();
    if signed_area(&v) < 0.0 {
        v.reverse();
    }
    let mut out = vec![];
    for i in 0..v.len() {
        let (p, q) = (v[i], v[(i + 1) % v.len()]);
        let len = (q[0] - p[0]).hypot(q[1] - p[1]);
        if len == 0.0 {
            continue;
        }
        // Counter-clockwise traversal: the outward normal is the edge
        // direction turned clockwise.
        let normal = [(q[1] - p[1]) / len, -(q[0] - p[0]) / len];
        segment_samples(p, q, normal, density, &mut out);
    }
    out
}

fn point_in_polygon(v: &[[f64; 2]], x: &[f64]) -> bool {
    let mut inside = false;
    let n = v.len();
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (v[i], v[j]);
        if (pi[1] > x[1]) != (pj[1] > x[1]) {
            let cross = pj[0] + (x[1] - pj[1]) / (pi[1] - pj[1]) * (pi[0] - pj[0]);
            if x[0] < cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}
