use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::solver::compactness_threshold;

/// RK4 steps per unit of `ln r`.
const STEPS_PER_UNIT: f64 = 2000.0;
/// Start radius as a fraction of the natural length `v(0)^{−(p−2)/2}`.
const START_FRACTION: f64 = 1e-4;
const MAX_BISECTIONS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialSample {
    pub r: f64,
    pub v: f64,
    /// `dv/dr`.
    pub dv: f64,
}

/// Positive radial solution of `−v'' − ((d−1)/r)v' = v^{p−1}` on the ball of
/// radius `radius`, `v'(0) = 0`, `v(radius) = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RadialSolution {
    pub dimension: usize,
    pub exponent: f64,
    pub radius: f64,
    pub center_value: f64,
    /// `|v(radius)|` of the returned trajectory.
    pub boundary_miss: f64,
    pub profile: Vec<RadialSample>,
}

impl RadialSolution {
    /// `v(r)` by cubic Hermite interpolation; zero outside the ball.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        if r >= self.radius {
            return 0.0;
        }
        let first = self.profile[0];
        if r <= first.r {
            let a = self.center_value;
            return a - a.powf(self.exponent - 1.0) * r * r / (2.0 * self.dimension as f64);
        }
        let k = self.profile.partition_point(|s| s.r <= r);
        if k >= self.profile.len() {
            return self.profile.last().map_or(0.0, |s| s.v.max(0.0));
        }
        let (a, b) = (self.profile[k - 1], self.profile[k]);
        let dr = b.r - a.r;
        let t = (r - a.r) / dr;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * a.v
            + (t3 - 2.0 * t2 + t) * dr * a.dv
            + (-2.0 * t3 + 3.0 * t2) * b.v
            + (t3 - t2) * dr * b.dv
    }
}

/// Shooting on the unit ball.
pub fn shoot_radial(d: usize, p: f64, tol: f64) -> Result<RadialSolution> {
    shoot_radial_on_ball(d, p, 1.0, tol)
}

/// Bisection on the centre value `α`: trajectories with `α` below the
/// solution's stay positive on `(0, R]`, those above cross zero inside.
pub fn shoot_radial_on_ball(d: usize, p: f64, radius: f64, tol: f64) -> Result<RadialSolution> {
    ensure!(d >= 2, Argument, "dimension must be at least 2, got {d}");
    ensure!(p > 2.0 && p.is_finite(), Argument, "exponent must exceed 2, got {p}");
    ensure!(radius > 0.0 && radius.is_finite(), Argument, "radius must be positive");
    ensure!(tol > 0.0, Argument, "tolerance must be positive");
    if let Some(c) = compactness_threshold(d) {
        ensure!(
            p < c,
            NoSolution,
            "no positive radial solution on a ball for p = {p} ≥ {c} in dimension {d}"
        );
    }

    let crosses = |alpha: f64| integrate(d, p, radius, alpha, false).crossed;
    let (mut lo, mut hi) = (1.0, 1.0);
    if crosses(1.0) {
        while crosses(lo) {
            lo *= 0.5;
            ensure!(lo > 1e-300, NoSolution, "no positive trajectory found");
        }
        hi = 2.0 * lo;
    } else {
        while !crosses(hi) {
            hi *= 2.0;
            ensure!(hi < 1e150, NoSolution, "no crossing trajectory found");
        }
        lo = 0.5 * hi;
    }
    for _ in 0..MAX_BISECTIONS {
        let lo_run = integrate(d, p, radius, lo, true);
        if lo_run.end_value.abs() <= tol {
            return Ok(RadialSolution {
                dimension: d,
                exponent: p,
                radius,
                center_value: lo,
                boundary_miss: lo_run.end_value.abs(),
                profile: lo_run.samples,
            });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if crosses(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::NotConverged(format!(
        "shooting bracket collapsed at v(0) = {lo} without reaching boundary miss {tol}"
    )))
}

struct Trajectory {
    crossed: bool,
    end_value: f64,
    samples: Vec<RadialSample>,
}

/// RK4 in `s = ln r` on `(v, w = r v')`:
/// `v_s = w`, `w_s = −(d−2)w − e^{2s}|v|^{p−2}v`.
fn integrate(d: usize, p: f64, radius: f64, alpha: f64, keep: bool) -> Trajectory {
    let dm2 = d as f64 - 2.0;
    let f = |v: f64| v.abs().powf(p - 2.0) * v;
    let rhs = |s: f64, v: f64, w: f64| (w, -dm2 * w - (2.0 * s).exp() * f(v));

    let natural = alpha.powf(-(p - 2.0) / 2.0);
    let r0 = START_FRACTION * natural.min(radius);
    let ap = alpha.powf(p - 1.0);
    let mut v = alpha - ap * r0 * r0 / (2.0 * d as f64);
    let mut w = -ap * r0 * r0 / d as f64;
    let (s0, s1) = (r0.ln(), radius.ln());
    let steps = ((s1 - s0) * STEPS_PER_UNIT).ceil().max(1.0) as usize;
    let ds = (s1 - s0) / steps as f64;
    let mut samples = Vec::with_capacity(if keep { steps + 1 } else { 0 });
    if keep {
        samples.push(RadialSample { r: r0, v, dv: w / r0 });
    }
    for i in 0..steps {
        let s = s0 + i as f64 * ds;
        let (k1v, k1w) = rhs(s, v, w);
        let (k2v, k2w) = rhs(s + 0.5 * ds, v + 0.5 * ds * k1v, w + 0.5 * ds * k1w);
        let (k3v, k3w) = rhs(s + 0.5 * ds, v + 0.5 * ds * k2v, w + 0.5 * ds * k2w);
        let (k4v, k4w) = rhs(s + ds, v + ds * k3v, w + ds * k3w);
        v += ds / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        w += ds / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        if v < 0.0 {
            return Trajectory {
                crossed: true,
                end_value: v,
                samples,
            };
        }
        if keep {
            let r = if i + 1 == steps { radius } else { (s + ds).exp() };
            samples.push(RadialSample { r, v, dv: w / r });
        }
    }
    Trajectory {
        crossed: false,
        end_value: v,
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lane_emden_d3_p4_is_positive_and_decreasing() {
        let sol = shoot_radial(3, 4.0, 1e-10).unwrap();
        assert!(sol.boundary_miss <= 1e-10);
        assert!(sol.profile.windows(2).all(|w| w[1].v <= w[0].v));
        assert!(sol.eval(0.0) > 0.0 && sol.eval(1.0) == 0.0);
    }

    #[test]
    fn scaling_law() {
        let (d, p, s) = (2, 4.0, 2.0);
        let unit = shoot_radial(d, p, 1e-12).unwrap();
        let small = shoot_radial_on_ball(d, p, 1.0 / s, 1e-12).unwrap();
        let predicted = s.powf(2.0 / (p - 2.0)) * unit.center_value;
        assert!((small.center_value - predicted).abs() <= 1e-8 * predicted);
        for r in [0.1, 0.25, 0.4] {
            let lhs = small.eval(r);
            let rhs = s.powf(2.0 / (p - 2.0)) * unit.eval(s * r);
            assert!((lhs - rhs).abs() <= 1e-7 * predicted, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn critical_and_bad_inputs() {
        assert!(matches!(shoot_radial(3, 6.0, 1e-10), Err(Error::NoSolution(_))));
        assert!(matches!(shoot_radial(4, 4.5, 1e-10), Err(Error::NoSolution(_))));
        assert!(shoot_radial(1, 4.0, 1e-10).is_err());
        assert!(shoot_radial(2, 2.0, 1e-10).is_err());
    }
}
