use serde_json::json;

use crate::algebra::{DilationModel, DivisionAlgebra};
use crate::certify::certificate::{Certificate, ExponentRanges};
use crate::certify::rotational::{exact_threshold, profile_echo, rotational_checks};
use crate::error::{ensure, Result};
use crate::geometry::{KFieldSpec, ProfileDomain};

/// Verdict for `𝕊_𝕂`-invariant solutions on `Ω = π⁻¹(U_n)`, where `U_n`
/// rotates the profile `Θ_n ⊂ ℝ^{dim𝕂−n+1}` about `n + 1` axes.
///
/// The reduced problem `−Δv = (1/(c*|x|))|v|^{p−2}v` on `U_n ⊂ ℝ^{dim𝕂+1}`
/// is the rotational problem with `K = 1/(c*|x|)` and block multiplicity
/// `n`, so the threshold is `2*_{N,k}` with `N = 2 dim𝕂`,
/// `k = dim𝕂 − 1 + n`. Nothing is claimed about non-invariant solutions.
pub fn certify_hopf(
    profile: &ProfileDomain,
    algebra: DivisionAlgebra,
    n: usize,
    p: f64,
    t0: f64,
    t1: f64,
    model: &DilationModel,
) -> Result<Certificate> {
    let dim = algebra.dim();
    ensure!(
        dim >= 2 && n <= dim - 2,
        Argument,
        "n must lie in 0..={} for {algebra}, got {n}",
        dim.saturating_sub(2)
    );
    ensure!(
        profile.dimension() == dim - n + 1,
        Argument,
        "profile must live in ℝ^{}, got ℝ^{}",
        dim - n + 1,
        profile.dimension()
    );
    ensure!(
        p.is_finite() && p > 0.0,
        Argument,
        "exponent must be positive and finite"
    );
    let big_n = 2 * dim;
    let k = dim - 1 + n;
    let (threshold, exact) = exact_threshold(big_n as i64, k as i64)?;
    let coefficient = KFieldSpec::InverseNorm {
        constant: model.constant,
    }
    .build()?;
    let checks = rotational_checks(profile, dim + 1, n as u32, t0, t1, &coefficient)?;
    let parameters = json!({
        "algebra": algebra,
        "n": n,
        "ambient": big_n,
        "k": k,
        "profile": profile_echo(profile),
        "dilationConstant": model.constant,
        "p": p,
        "t0": t0,
        "t1": t1,
    });
    Ok(Certificate::assemble(
        "hopf-invariant",
        "S_K-invariant solutions only; other solutions are not addressed",
        p,
        threshold,
        exact,
        ExponentRanges {
            nonexistence_from: threshold,
            existence_below: threshold,
        },
        checks,
        parameters,
    ))
}
