use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A coefficient `K` together with its gradient.
#[derive(Clone)]
pub struct KField {
    pub value: ValueFn,
    pub gradient: GradFn,
    /// Human-readable description echoed into certificates.
    pub label: String,
}

impl fmt::Debug for KField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KField({})", self.label)
    }
}

impl KField {
    pub fn new(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            label: "custom".into(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, |x| vec![0.0; x.len()]).with_label(format!("constant({c})"))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }

    /// Full-space form `K(y, z) = K̃(|y|, z)` of a coefficient given on
    /// profile coordinates `(t, z)`, with `y ∈ ℝ^{y_dim}`.
    pub fn rotated(&self, y_dim: usize) -> KField {
        let (v, g) = (self.value.clone(), self.gradient.clone());
        let collapse = move |x: &[f64]| {
            let r = x[..y_dim].iter().map(|c| c * c).sum::<f64>().sqrt();
            let mut p = Vec::with_capacity(x.len() - y_dim + 1);
            p.push(r);
            p.extend_from_slice(&x[y_dim..]);
            (r, p)
        };
        let collapse2 = collapse;
        KField::new(
            move |x| v(&collapse(x).1),
            move |x| {
                let (r, p) = collapse2(x);
                let gp = g(&p);
                let mut out = Vec::with_capacity(x.len());
                for c in &x[..y_dim] {
                    out.push(if r > 0.0 { gp[0] * c / r } else { 0.0 });
                }
                out.extend_from_slice(&gp[1..]);
                out
            },
        )
        .with_label(format!("{} of (|y|, z)", self.label))
    }
}

/// Serializable description of the usual coefficients, in profile
/// coordinates `(t, z)` with `t = |y|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KFieldSpec {
    /// `K ≡ value`.
    Constant { value: f64 },
    /// `K = exp(−|x|²)`.
    Gaussian,
    /// `K = t^power`, i.e. `|y|^power`.
    AxialPower { power: f64 },
    /// `K = 1/(constant·|x|)`.
    InverseNorm { constant: f64 },
}

impl Default for KFieldSpec {
    fn default() -> Self {
        KFieldSpec::Constant { value: 1.0 }
    }
}

impl KFieldSpec {
    pub fn build(&self) -> Result<KField> {
        let field = match *self {
            KFieldSpec::Constant { value } => {
                ensure!(
                    value > 0.0 && value.is_finite(),
                    Argument,
                    "K must be positive, got {value}"
                );
                KField::constant(value)
            }
            KFieldSpec::Gaussian => KField::new(
                |x| (-x.iter().map(|c| c * c).sum::<f64>()).exp(),
                |x| {
                    let k = (-x.iter().map(|c| c * c).sum::<f64>()).exp();
                    x.iter().map(|c| -2.0 * c * k).collect()
                },
            )
            .with_label("exp(-|x|^2)"),
            KFieldSpec::AxialPower { power } => {
                ensure!(power.is_finite(), Argument, "power must be finite");
                KField::new(
                    move |x| x[0].powf(power),
                    move |x| {
                        let mut g = vec![0.0; x.len()];
                        g[0] = power * x[0].powf(power - 1.0);
                        g
                    },
                )
                .with_label(format!("|y|^{power}"))
            }
            KFieldSpec::InverseNorm { constant } => {
                ensure!(
                    constant > 0.0 && constant.is_finite(),
                    Argument,
                    "constant must be positive"
                );
                KField::new(
                    move |x| 1.0 / (constant * x.iter().map(|c| c * c).sum::<f64>().sqrt()),
                    move |x| {
                        let r2: f64 = x.iter().map(|c| c * c).sum();
                        let f = -1.0 / (constant * r2 * r2.sqrt());
                        x.iter().map(|c| f * c).collect()
                    },
                )
                .with_label(format!("1/({constant}|x|)"))
            }
        };
        Ok(field)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityWitness {
    pub point: Vec<f64>,
    /// `⟨y, ∂_y K⟩`.
    pub y_term: f64,
    /// `⟨z, ∂_z K⟩`.
    pub z_term: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityVerdict {
    pub pass: bool,
    pub witnesses: Vec<MonotonicityWitness>,
    pub failures: usize,
    pub samples_checked: usize,
    pub tolerance: f64,
}

const FD_REL_TOL: f64 = 0.01;
const MAX_FD_CHECKS: usize = 256;

/// Checks `⟨y, ∂_yK⟩ ≤ tol` and `⟨z, ∂_zK⟩ ≤ tol` at every sample
/// `(y, z)`, `y` being the first `y_dim` coordinates.
///
/// The supplied gradient is first compared against central differences of
/// `K` at (up to 256 of) the samples; a mismatch above 1% is an argument
/// error.
pub fn k_monotonicity_check(k: &KField, samples: &[Vec<f64>], y_dim: usize, tol: f64) -> Result<MonotonicityVerdict> {
    ensure!(!samples.is_empty(), Argument, "no interior samples given");
    let stride = (samples.len() / MAX_FD_CHECKS).max(1);
    for x in samples.iter().step_by(stride) {
        ensure!(y_dim <= x.len(), Argument, "y block larger than the sample dimension");
        let g = k.grad(x);
        ensure!(g.len() == x.len(), Argument, "gradient has the wrong dimension");
        let mut y = x.clone();
        let mut fd = vec![0.0; x.len()];
        for i in 0..x.len() {
            let h = 1e-6 * x[i].abs().max(1.0);
            y[i] = x[i] + h;
            let fp = k.eval(&y);
            y[i] = x[i] - h;
            let fm = k.eval(&y);
            y[i] = x[i];
            fd[i] = (fp - fm) / (2.0 * h);
        }
        let scale = g.iter().chain(&fd).fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..x.len() {
            if (fd[i] - g[i]).abs() > FD_REL_TOL * scale + 1e-7 {
                return Err(Error::Argument(format!(
                    "gradient of K disagrees with finite differences at {x:?} (component {i}: {} vs {})",
                    g[i], fd[i]
                )));
            }
        }
    }
    let mut witnesses = vec![];
    let mut failures = 0;
    for x in samples {
        let g = k.grad(x);
        let y_term: f64 = x[..y_dim].iter().zip(&g[..y_dim]).map(|(a, b)| a * b).sum();
        let z_term: f64 = x[y_dim..].iter().zip(&g[y_dim..]).map(|(a, b)| a * b).sum();
        if y_term > tol || z_term > tol {
            failures += 1;
            if witnesses.len() < 64 {
                witnesses.push(MonotonicityWitness {
                    point: x.clone(),
                    y_term,
                    z_term,
                });
            }
        }
    }
    Ok(MonotonicityVerdict {
        pass: failures == 0,
        witnesses,
        failures,
        samples_checked: samples.len(),
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples() -> Vec<Vec<f64>> {
        let mut out = vec![];
        for i in 0..5 {
            for j in 0..5 {
                out.push(vec![0.5 + 0.3 * i as f64, 0.1, -0.4 + 0.2 * j as f64]);
            }
        }
        out
    }

    #[test]
    fn constant_passes() {
        let v = k_monotonicity_check(&KField::constant(1.0), &samples(), 2, 1e-9).unwrap();
        assert!(v.pass);
    }

    #[test]
    fn gaussian_passes() {
        let k = KField::new(
            |x| (-x.iter().map(|c| c * c).sum::<f64>()).exp(),
            |x| {
                let e = (-x.iter().map(|c| c * c).sum::<f64>()).exp();
                x.iter().map(|c| -2.0 * c * e).collect()
            },
        );
        assert!(k_monotonicity_check(&k, &samples(), 2, 1e-9).unwrap().pass);
    }

    #[test]
    fn growing_in_y_fails() {
        let k = KField::new(|x| x[0] * x[0] + x[1] * x[1], |x| vec![2.0 * x[0], 2.0 * x[1], 0.0]);
        let v = k_monotonicity_check(&k, &samples(), 2, 1e-9).unwrap();
        assert!(!v.pass);
        assert_eq!(v.failures, 25);
        assert!(v.witnesses.iter().all(|w| w.y_term > 0.0));
    }

    #[test]
    fn inconsistent_gradient_is_rejected() {
        let k = KField::new(|x| x[0], |x| vec![0.0; x.len()]);
        assert!(matches!(
            k_monotonicity_check(&k, &samples(), 2, 1e-9),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn rotated_field_chain_rule() {
        let base = KField::new(|p| p[0] * p[0] + p[1], |p| vec![2.0 * p[0], 1.0]);
        let full = base.rotated(2);
        let x = [0.6, 0.8, 0.3];
        assert!((full.eval(&x) - 1.3).abs() < 1e-15);
        let g = full.grad(&x);
        assert!((g[0] - 1.2).abs() < 1e-15 && (g[1] - 1.6).abs() < 1e-15 && g[2] == 1.0);
    }
}
