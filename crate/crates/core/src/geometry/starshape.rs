use serde::Serialize;

use super::{phi, ChiParams, ProfileDomain};
use crate::error::{ensure, Error, Result};

/// Recorded witnesses per violated condition.
const MAX_WITNESSES: usize = 32;
/// Samples closer than this fraction of the profile scale to a reference
/// pole are skipped.
const POLE_EXCLUSION: f64 = 1e-3;

/// A boundary sample that violates a strict inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub condition: String,
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StarshapeVerdict {
    pub pass: bool,
    /// At most 32 violations per condition; `failures` counts all of them.
    pub witnesses: Vec<Witness>,
    pub failures: usize,
    pub t0: f64,
    pub t1: f64,
    pub samples_checked: usize,
    pub samples_skipped: usize,
    pub tolerance: f64,
}

struct Collector {
    witnesses: Vec<Witness>,
    failures: usize,
}

impl Collector {
    fn new() -> Self {
        Self {
            witnesses: vec![],
            failures: 0,
        }
    }

    fn fail(&mut self, condition: &str, point: &[f64], value: f64) {
        self.failures += 1;
        if self.witnesses.iter().filter(|w| w.condition == condition).count() < MAX_WITNESSES {
            self.witnesses.push(Witness {
                condition: condition.into(),
                point: point.to_vec(),
                value,
            });
        }
    }
}

fn pole(t: f64, d: usize) -> Vec<f64> {
    let mut p = vec![0.0; d];
    p[0] = t;
    p
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn pole_radius(profile: &ProfileDomain) -> f64 {
    POLE_EXCLUSION * (0.5 * profile.bounding_box().diameter()).max(1.0)
}

/// Checks that every boundary sample has first coordinate in `[t0, t1]`
/// (closure of the open condition, with slack `tol_geo`) and that the
/// profile is strictly starshaped with respect to `(t0, 0)` and `(t1, 0)`:
/// `⟨x − ξ_i, ν(x)⟩ > tol_geo` away from the pole `ξ_i`.
pub fn doubly_starshaped_check(profile: &ProfileDomain, t0: f64, t1: f64) -> Result<StarshapeVerdict> {
    ensure!(
        0.0 < t0 && t0 < t1,
        Argument,
        "need 0 < t0 < t1, got t0 = {t0}, t1 = {t1}"
    );
    let d = profile.dimension();
    let tol = profile.tol_geo();
    let poles = [pole(t0, d), pole(t1, d)];
    let exclusion = pole_radius(profile);
    let mut c = Collector::new();
    let mut skipped = 0;
    for s in profile.samples() {
        let t = s.point[0];
        if t < t0 - tol || t > t1 + tol {
            c.fail("containment", &s.point, t);
        }
        for (i, xi) in poles.iter().enumerate() {
            if dist(&s.point, xi) <= exclusion {
                skipped += 1;
                continue;
            }
            let v: f64 = s
                .point
                .iter()
                .zip(xi)
                .zip(&s.normal)
                .map(|((x, q), n)| (x - q) * n)
                .sum();
            if v <= tol {
                c.fail(if i == 0 { "starshaped_xi0" } else { "starshaped_xi1" }, &s.point, v);
            }
        }
    }
    Ok(StarshapeVerdict {
        pass: c.failures == 0,
        witnesses: c.witnesses,
        failures: c.failures,
        t0,
        t1,
        samples_checked: profile.samples().len(),
        samples_skipped: skipped,
        tolerance: tol,
    })
}

/// Checks `⟨(φ(t)t, z), ν(t, z)⟩ > tol_geo` on the boundary, skipping the
/// pole `(τ, 0)` where the field vanishes. Single rotational block only.
pub fn boundary_flux_check(profile: &ProfileDomain, params: &ChiParams) -> Result<StarshapeVerdict> {
    if params.m() != 1 {
        return Err(Error::Unsupported(format!(
            "boundary flux check needs one rotational block, got {}",
            params.m()
        )));
    }
    let d = profile.dimension();
    let (tau, k) = (params.taus[0], params.ks[0]);
    let tol = profile.tol_geo();
    let xi0 = pole(tau, d);
    let exclusion = pole_radius(profile);
    let mut c = Collector::new();
    let mut skipped = 0;
    for s in profile.samples() {
        if dist(&s.point, &xi0) <= exclusion {
            skipped += 1;
            continue;
        }
        let t = s.point[0];
        if t <= 0.0 {
            return Err(Error::Domain(format!("boundary sample with t = {t} ≤ 0")));
        }
        let radial = phi(t, tau, k)? * t;
        let v = radial * s.normal[0] + s.point[1..].iter().zip(&s.normal[1..]).map(|(z, n)| z * n).sum::<f64>();
        if v <= tol {
            c.fail("flux", &s.point, v);
        }
    }
    Ok(StarshapeVerdict {
        pass: c.failures == 0,
        witnesses: c.witnesses,
        failures: c.failures,
        t0: tau,
        t1: f64::INFINITY,
        samples_checked: profile.samples().len(),
        samples_skipped: skipped,
        tolerance: tol,
    })
}
