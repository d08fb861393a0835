use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::scalar::Extended;

/// Orbit data entering the compactness threshold
/// `c < μ*·S^{M/2}/M`, `μ* = min #Gx / K(x)^{(M−2)/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitData {
    pub min_orbit_weight: Extended<f64>,
    /// Best Sobolev constant; not fixed by the theory, default 1.
    pub sobolev_constant: f64,
    pub dimension: u32,
}

impl OrbitData {
    pub fn new(min_orbit_weight: Extended<f64>, sobolev_constant: f64, dimension: u32) -> Result<Self> {
        if let Extended::Finite(mu) = min_orbit_weight {
            ensure!(
                mu > 0.0 && mu.is_finite(),
                Argument,
                "orbit weight must be positive, got {mu}"
            );
        }
        ensure!(
            sobolev_constant > 0.0 && sobolev_constant.is_finite(),
            Argument,
            "Sobolev constant must be positive, got {sobolev_constant}"
        );
        ensure!(dimension >= 1, Argument, "dimension must be positive");
        Ok(Self {
            min_orbit_weight,
            sobolev_constant,
            dimension,
        })
    }

    /// `S^{M/2}/M`, the single-bubble energy unit.
    pub fn bubble_energy(&self) -> f64 {
        let m = self.dimension;
        let s = self.sobolev_constant;
        let pow = if m.is_multiple_of(2) {
            s.powi((m / 2) as i32)
        } else {
            s.powf(m as f64 / 2.0)
        };
        pow / m as f64
    }
}

/// Energy level below which Palais–Smale sequences are compact.
pub fn ps_threshold(orbit: &OrbitData) -> Extended<f64> {
    orbit.min_orbit_weight.map(|mu| mu * orbit.bubble_energy())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelBound {
    /// `Σ J(ω_{D_i})`, an upper bound for the level `c_k`.
    pub c_upper: f64,
    /// `c_upper / (S^{M/2}/M)`, an upper bound for `ℓ_k`.
    pub ell_upper: f64,
}

/// Upper bounds from mountain-pass energies of disjoint subdomain problems.
pub fn level_bound(energies: &[f64], orbit: &OrbitData) -> Result<LevelBound> {
    ensure!(!energies.is_empty(), Argument, "no subdomain energies given");
    ensure!(
        energies.iter().all(|e| *e > 0.0 && e.is_finite()),
        Argument,
        "subdomain energies must be positive"
    );
    let c_upper: f64 = energies.iter().sum();
    Ok(LevelBound {
        c_upper,
        ell_upper: c_upper / orbit.bubble_energy(),
    })
}

/// The orbit-size side of the multiplicity hypothesis next to the only
/// computable bound on the unknown level; no verdict is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MultiplicityReport {
    pub orbit_side: f64,
    pub ell_upper: f64,
    pub note: &'static str,
}

pub fn multiplicity_report(orbit_side: f64, bound: &LevelBound) -> MultiplicityReport {
    MultiplicityReport {
        orbit_side,
        ell_upper: bound.ell_upper,
        note: "ell_upper bounds the level from above only; comparison is informational",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orbit(mu: f64, s: f64, m: u32) -> OrbitData {
        OrbitData::new(Extended::Finite(mu), s, m).unwrap()
    }

    #[test]
    fn threshold_values() {
        assert_eq!(ps_threshold(&orbit(1.0, 1.0, 4)), Extended::Finite(0.25));
        assert_eq!(ps_threshold(&orbit(2.0, 3.0, 2)), Extended::Finite(3.0));
        let inf = OrbitData::new(Extended::PosInfinity, 1.0, 4).unwrap();
        assert_eq!(ps_threshold(&inf), Extended::PosInfinity);
    }

    #[test]
    fn level_bounds() {
        let o = orbit(1.0, 1.0, 4);
        assert!(level_bound(&[], &o).is_err());
        assert_eq!(level_bound(&[0.5], &o).unwrap().c_upper, 0.5);
        let b = level_bound(&[0.5, 0.75], &o).unwrap();
        assert_eq!(b.c_upper, 1.25);
        assert_eq!(b.ell_upper, 5.0);
        let r = multiplicity_report(2.0, &b);
        assert_eq!(r.ell_upper, 5.0);
    }

    #[test]
    fn invalid_orbit_data() {
        assert!(OrbitData::new(Extended::Finite(0.0), 1.0, 4).is_err());
        assert!(OrbitData::new(Extended::Finite(1.0), -1.0, 4).is_err());
    }
}
