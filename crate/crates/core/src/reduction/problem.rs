use std::fmt;
use std::sync::Arc;

use crate::error::{ensure, Result};
use crate::geometry::ProfileDomain;

/// A scalar function of position, shared between threads.
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// `−div(a∇v) + c₀ v = Q |v|^{p−2} v` in `U`, `v = 0` on `∂U`.
///
/// `weight` is `a`, `coefficient` is `Q`, `linear_term` is `c₀`.
#[derive(Clone)]
pub struct WeightedEllipticProblem {
    pub domain: ProfileDomain,
    pub weight: ScalarFn,
    pub coefficient: ScalarFn,
    pub linear_term: ScalarFn,
    pub exponent: f64,
    pub description: String,
}

impl fmt::Debug for WeightedEllipticProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightedEllipticProblem")
            .field("domain", &self.domain.shape())
            .field("exponent", &self.exponent)
            .field("description", &self.description)
            .finish()
    }
}

pub fn constant_fn(c: f64) -> ScalarFn {
    Arc::new(move |_: &[f64]| c)
}

impl WeightedEllipticProblem {
    pub fn new(
        domain: ProfileDomain,
        weight: ScalarFn,
        coefficient: ScalarFn,
        linear_term: ScalarFn,
        exponent: f64,
        description: impl Into<String>,
    ) -> Result<Self> {
        ensure!(
            exponent > 2.0 && exponent.is_finite(),
            Argument,
            "exponent must exceed 2, got {exponent}"
        );
        let problem = Self {
            domain,
            weight,
            coefficient,
            linear_term,
            exponent,
            description: description.into(),
        };
        problem.check_coefficients()?;
        Ok(problem)
    }

    /// `−Δv = |v|^{p−2}v` on the domain.
    pub fn plain(domain: ProfileDomain, exponent: f64) -> Result<Self> {
        Self::new(
            domain,
            constant_fn(1.0),
            constant_fn(1.0),
            constant_fn(0.0),
            exponent,
            "-Δv = |v|^{p-2} v",
        )
    }

    pub fn with_exponent(&self, exponent: f64) -> Result<Self> {
        ensure!(
            exponent > 2.0 && exponent.is_finite(),
            Argument,
            "exponent must exceed 2, got {exponent}"
        );
        Ok(Self {
            exponent,
            ..self.clone()
        })
    }

    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    /// `a > 0`, `Q > 0`, `c₀ ≥ 0` on boundary samples and an interior lattice.
    fn check_coefficients(&self) -> Result<()> {
        let boundary = self.domain.samples().iter().map(|s| s.point.clone());
        let interior = self.domain.interior_samples(12);
        for x in boundary.chain(interior) {
            let (a, q, c) = ((self.weight)(&x), (self.coefficient)(&x), (self.linear_term)(&x));
            ensure!(a > 0.0 && a.is_finite(), Domain, "weight is not positive at {x:?}: {a}");
            ensure!(
                q > 0.0 && q.is_finite(),
                Domain,
                "coefficient is not positive at {x:?}: {q}"
            );
            ensure!(
                c >= 0.0 && c.is_finite(),
                Domain,
                "linear term is negative at {x:?}: {c}"
            );
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_profile, ProfileShape};

    fn disk() -> ProfileDomain {
        make_profile(
            ProfileShape::Ball {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
            Some(32.0),
        )
        .unwrap()
    }

    #[test]
    fn plain_problem() {
        let p = WeightedEllipticProblem::plain(disk(), 4.0).unwrap();
        assert_eq!(p.dimension(), 2);
        assert_eq!((p.coefficient)(&[0.3, 0.2]), 1.0);
        assert_eq!(p.with_exponent(5.0).unwrap().exponent, 5.0);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(WeightedEllipticProblem::plain(disk(), 2.0).is_err());
        let negative: ScalarFn = Arc::new(|x: &[f64]| x[0]);
        let r = WeightedEllipticProblem::new(disk(), constant_fn(1.0), negative, constant_fn(0.0), 4.0, "");
        assert!(matches!(r, Err(crate::Error::Domain(_))));
    }
}
