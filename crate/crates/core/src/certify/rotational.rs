use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;

use crate::certify::certificate::{Certificate, CheckRecord, CheckWitness, ExponentRanges, MAX_RECORDED_WITNESSES};
use crate::error::{ensure, Result};
use crate::geometry::{
    boundary_flux_check, doubly_starshaped_check, k_monotonicity_check, make_profile, rho_equation, solve_rho,
    ChiParams, KField, MonotonicityVerdict, ProfileDomain, ProfileShape, StarshapeVerdict,
};
use crate::reduction::{critical_exponent, RotationalSpec};
use crate::scalar::Extended;
use crate::Rational;

/// Shrink applied to the largest admissible `α`.
pub const ALPHA_MARGIN: f64 = 1e-9;
/// Lattice resolution for interior samples used by coefficient checks.
const INTERIOR_SAMPLES_PER_AXIS: usize = 16;
/// A sampled boundary predicate that passes is re-run at this multiple of
/// the sampling density before it is trusted; a failure already has its
/// witness.
pub const REVALIDATION_FACTOR: f64 = 4.0;

fn revalidated(
    profile: &ProfileDomain,
    check: impl Fn(&ProfileDomain) -> Result<StarshapeVerdict>,
) -> Result<StarshapeVerdict> {
    let coarse = check(profile)?;
    if !coarse.pass {
        return Ok(coarse);
    }
    check(&profile.refined(REVALIDATION_FACTOR)?)
}

pub(crate) fn starshape_record(v: &StarshapeVerdict, detail: String) -> CheckRecord {
    CheckRecord {
        pass: v.pass,
        samples_checked: v.samples_checked,
        failures: v.failures,
        tolerance: v.tolerance,
        witnesses: v
            .witnesses
            .iter()
            .take(MAX_RECORDED_WITNESSES)
            .map(|w| CheckWitness {
                condition: w.condition.clone(),
                point: w.point.clone(),
                value: w.value,
            })
            .collect(),
        detail,
    }
}

pub(crate) fn monotonicity_record(v: &MonotonicityVerdict, label: &str) -> CheckRecord {
    CheckRecord {
        pass: v.pass,
        samples_checked: v.samples_checked,
        failures: v.failures,
        tolerance: v.tolerance,
        witnesses: v
            .witnesses
            .iter()
            .take(MAX_RECORDED_WITNESSES)
            .map(|w| CheckWitness {
                condition: if w.y_term > v.tolerance { "y_term" } else { "z_term" }.into(),
                point: w.point.clone(),
                value: w.y_term.max(w.z_term),
            })
            .collect(),
        detail: format!("<y, d_y K> <= tol and <z, d_z K> <= tol for K = {label}"),
    }
}

pub(crate) fn exact_threshold(n: i64, k: i64) -> Result<(Extended<f64>, String)> {
    let exact = critical_exponent::<Rational>(n, k)?;
    let float = critical_exponent::<f64>(n, k)?;
    Ok((float, exact.to_string()))
}

pub(crate) fn profile_echo(profile: &ProfileDomain) -> serde_json::Value {
    json!({ "shape": profile.shape(), "density": profile.density() })
}

/// Runs the three geometric/coefficient checks shared by the rotational and
/// Hopf certificates: doubly starshaped w.r.t. `(t0,0)`, `(t1,0)`; outward
/// flux of the block field with `τ = t0`; monotonicity of `K`.
pub(crate) fn rotational_checks(
    profile: &ProfileDomain,
    ambient: usize,
    k_block: u32,
    t0: f64,
    t1: f64,
    k: &KField,
) -> Result<BTreeMap<String, CheckRecord>> {
    let mut checks = BTreeMap::new();
    let star = revalidated(profile, |p| doubly_starshaped_check(p, t0, t1))?;
    checks.insert(
        "doubly_starshaped".to_string(),
        starshape_record(
            &star,
            format!("strictly starshaped w.r.t. ({t0},0) and ({t1},0), first coordinates in [{t0},{t1}]"),
        ),
    );
    let params = ChiParams::new(vec![t0], vec![k_block], ambient)?;
    let flux = revalidated(profile, |p| boundary_flux_check(p, &params))?;
    checks.insert(
        "boundary_flux".to_string(),
        starshape_record(
            &flux,
            format!("<chi, nu> > tol on the boundary, tau = {t0}, k = {k_block}"),
        ),
    );
    let interior = profile.interior_samples(INTERIOR_SAMPLES_PER_AXIS);
    let mono = k_monotonicity_check(k, &interior, 1, profile.tol_geo())?;
    checks.insert("k_monotonicity".to_string(), monotonicity_record(&mono, &k.label));
    Ok(checks)
}

/// Nonexistence for `p ≥ 2*_{N,k}` / existence for `2 < p < 2*_{N,k}` on a
/// single-block rotational domain whose profile is doubly starshaped with
/// respect to `(t0,0)` and `(t1,0)`, for `−Δu = K|u|^{p−2}u`.
pub fn certify_doubly_starshaped(spec: &RotationalSpec, p: f64, t0: f64, t1: f64) -> Result<Certificate> {
    ensure!(
        spec.m() == 1,
        Argument,
        "one rotated block is required, got {}",
        spec.m()
    );
    let (n, k) = (spec.ambient as i64, spec.k_total() as i64);
    ensure!(k <= n - 3, Hypothesis, "need k ≤ N − 3, got N = {n}, k = {k}");
    ensure!(
        p.is_finite() && p > 0.0,
        Argument,
        "exponent must be positive and finite"
    );
    let (threshold, exact) = exact_threshold(n, k)?;
    let checks = rotational_checks(&spec.profile, spec.ambient, spec.multiplicities[0], t0, t1, &spec.k)?;
    let parameters = json!({
        "ambient": spec.ambient,
        "multiplicities": spec.multiplicities,
        "profile": profile_echo(&spec.profile),
        "coefficient": spec.k.label,
        "p": p,
        "t0": t0,
        "t1": t1,
    });
    Ok(Certificate::assemble(
        "rotational-doubly-starshaped",
        "all solutions of -Δu = K|u|^(p-2)u in the rotational domain",
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

/// Certificate for a product-of-spheres domain built from a ball profile,
/// together with the constructed data.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BallProductCertificate {
    pub certificate: Certificate,
    pub alpha: f64,
    pub rho: f64,
    pub center: Vec<f64>,
    #[serde(skip)]
    pub profile: ProfileDomain,
}

/// Nonexistence for `p ≥ 2*_{N,k} + ε`, existence for `2 < p < 2*_{N,k}`,
/// on the domain of homotopy type `S^{k₁}×…×S^{k_m}` obtained by rotating
/// the ball of radius `ρ` about `(τ₁,…,τ_m,0)`. `α` is the largest value
/// with `2(N−k)/(N−k−2α) ≤ 2*_{N,k} + ε`, less [`ALPHA_MARGIN`], and `ρ`
/// solves `max_i{1 − k_iφ_i(τ_i − ρ)} = α`.
pub fn certify_ball_product(
    multiplicities: &[u32],
    taus: &[f64],
    epsilon: f64,
    p: f64,
    ambient: usize,
) -> Result<BallProductCertificate> {
    ensure!(!multiplicities.is_empty(), Argument, "at least one block is required");
    ensure!(
        multiplicities.len() == taus.len(),
        Argument,
        "{} multiplicities but {} centres",
        multiplicities.len(),
        taus.len()
    );
    ensure!(
        epsilon > 0.0 && epsilon.is_finite(),
        Argument,
        "epsilon must be positive, got {epsilon}"
    );
    ensure!(taus.iter().all(|t| *t > 0.0), Argument, "centres must be positive");
    ensure!(
        multiplicities.iter().all(|k| *k > 0),
        Argument,
        "multiplicities must be positive"
    );
    let k: usize = multiplicities.iter().map(|k| *k as usize).sum();
    let (n_amb, k_i) = (ambient as i64, k as i64);
    ensure!(
        k_i <= n_amb - 3,
        Hypothesis,
        "need k ≤ N − 3, got N = {ambient}, k = {k}"
    );
    let (threshold, exact) = exact_threshold(n_amb, k_i)?;
    let crit = threshold.finite().expect("finite when N − k ≥ 3");
    let n = (ambient - k) as f64;
    let target = crit + epsilon;
    let alpha = 0.5 * n * (1.0 - 2.0 / target) - ALPHA_MARGIN;
    ensure!(
        alpha > 1.0 && alpha < 0.5 * n,
        Hypothesis,
        "no admissible alpha in (1, {}) for epsilon = {epsilon}",
        0.5 * n
    );
    let params = ChiParams::new(taus.to_vec(), multiplicities.to_vec(), ambient)?;
    let rho = solve_rho(alpha, &params)?;
    let mut center = vec![0.0; ambient - k];
    center[..taus.len()].copy_from_slice(taus);
    let profile = make_profile(
        ProfileShape::Ball {
            center: center.clone(),
            radius: rho,
        },
        None,
    )?;

    let mut checks = BTreeMap::new();
    let reached = 2.0 * n / (n - 2.0 * alpha);
    checks.insert(
        "alpha_admissible".to_string(),
        CheckRecord {
            pass: alpha > 1.0 && alpha < 0.5 * n && reached <= target,
            ..CheckRecord::passed(format!("alpha = {alpha}, 2(N-k)/(N-k-2 alpha) = {reached} <= {target}"))
        },
    );
    let residual = rho_equation(rho, alpha, &params)?;
    checks.insert(
        "rho_equation".to_string(),
        CheckRecord {
            pass: residual.abs() <= 1e-10,
            tolerance: 1e-10,
            ..CheckRecord::passed(format!("max_i(1 - k_i phi_i(tau_i - rho)) - alpha = {residual:e}"))
        },
    );
    let tau_min = taus.iter().cloned().fold(f64::INFINITY, f64::min);
    checks.insert(
        "profile_in_open_orthant".to_string(),
        CheckRecord {
            pass: rho < tau_min,
            ..CheckRecord::passed(format!("rho = {rho} < min tau = {tau_min}"))
        },
    );
    checks.insert("boundary_flux".to_string(), flux_record(&profile, &params)?);
    checks.insert("chi_bound".to_string(), chi_bound_record(&profile, &params, alpha)?);

    let parameters = json!({
        "ambient": ambient,
        "multiplicities": multiplicities,
        "taus": taus,
        "epsilon": epsilon,
        "p": p,
    });
    let certificate = Certificate::assemble(
        "rotational-ball-product",
        "all solutions of -Δu = |u|^(p-2)u in the constructed domain",
        p,
        Extended::Finite(target),
        format!("{exact} + {epsilon}"),
        ExponentRanges {
            nonexistence_from: Extended::Finite(target),
            existence_below: threshold,
        },
        checks,
        parameters,
    );
    Ok(BallProductCertificate {
        certificate,
        alpha,
        rho,
        center,
        profile,
    })
}

/// `⟨χ, ν⟩ > tol` at every boundary sample, any number of blocks.
fn flux_record(profile: &ProfileDomain, params: &ChiParams) -> Result<CheckRecord> {
    let tol = profile.tol_geo();
    let mut rec = CheckRecord::passed("<chi, nu> > tol on the boundary of the constructed profile");
    rec.tolerance = tol;
    for s in profile.samples() {
        let chi = params.profile_field(&s.point)?;
        let v: f64 = chi.iter().zip(&s.normal).map(|(a, b)| a * b).sum();
        rec.samples_checked += 1;
        if v <= tol {
            rec.pass = false;
            rec.failures += 1;
            if rec.witnesses.len() < MAX_RECORDED_WITNESSES {
                rec.witnesses.push(CheckWitness {
                    condition: "flux".into(),
                    point: s.point.clone(),
                    value: v,
                });
            }
        }
    }
    Ok(rec)
}

/// `max_i(1 − k_iφ_i(x_i)) ≤ α` at interior samples of the profile.
fn chi_bound_record(profile: &ProfileDomain, params: &ChiParams, alpha: f64) -> Result<CheckRecord> {
    let tol = 1e-9;
    let mut rec = CheckRecord::passed(format!("quadratic form bound of d chi <= alpha = {alpha} inside"));
    rec.tolerance = tol;
    let pts = profile.interior_samples(INTERIOR_SAMPLES_PER_AXIS.min(8));
    for x in &pts {
        let mut worst = 1.0f64;
        for ((xi, &k), &tau) in x.iter().zip(&params.ks).zip(&params.taus) {
            worst = worst.max(1.0 - k as f64 * crate::geometry::phi(*xi, tau, k)?);
        }
        rec.samples_checked += 1;
        if worst > alpha + tol {
            rec.pass = false;
            rec.failures += 1;
            if rec.witnesses.len() < MAX_RECORDED_WITNESSES {
                rec.witnesses.push(CheckWitness {
                    condition: "chi_bound".into(),
                    point: x.clone(),
                    value: worst,
                });
            }
        }
    }
    Ok(rec)
}
