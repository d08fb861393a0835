use super::{phi, ChiParams};
use crate::error::{ensure, Error, Result};

/// `max_i {1 − k_iφ_i(τ_i − ρ)} − α`.
pub fn rho_equation(rho: f64, alpha: f64, params: &ChiParams) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for (tau, k) in params.taus.iter().zip(&params.ks) {
        let f = phi(tau - rho, *tau, *k)?;
        worst = worst.max(1.0 - *k as f64 * f);
    }
    Ok(worst - alpha)
}

/// The radius `ρ ∈ (0, min τ_i)` at which the largest eigenvalue bound of
/// `dχ` on the ball about `(τ₁, …, τ_m, 0)` reaches `α`.
///
/// The left side increases strictly from 1 at `ρ = 0` to `+∞` as `ρ`
/// approaches `min τ_i`, so plain bisection applies.
pub fn solve_rho(alpha: f64, params: &ChiParams) -> Result<f64> {
    let upper = (params.ambient - params.k_total()) as f64 / 2.0;
    ensure!(
        alpha > 1.0 && alpha < upper,
        Argument,
        "alpha must lie in (1, {upper}), got {alpha}"
    );
    ensure!(params.k_total() > 0, Argument, "some multiplicity must be positive");
    let tau_min = params.taus.iter().cloned().fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi) = (0.0f64, tau_min);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = rho_equation(mid, alpha, params)?;
        if g == 0.0 {
            return Ok(mid);
        }
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // The better of the two bracket ends.
    let glo = rho_equation(lo, alpha, params)?.abs();
    let ghi = if hi < tau_min {
        rho_equation(hi, alpha, params)?.abs()
    } else {
        f64::INFINITY
    };
    let (rho, res) = if glo <= ghi { (lo, glo) } else { (hi, ghi) };
    // Blocks with k_i = 0 contribute a constant 1; if one of them has the
    // smallest τ the left side stays bounded and α may be out of reach.
    ensure!(
        tau_min - lo > 1e-12 * tau_min || res <= 1e-10,
        Argument,
        "alpha = {alpha} is not attained for rho < min tau = {tau_min}"
    );
    if res > 1e-10 {
        return Err(Error::NotConverged(format!(
            "rho bisection stalled with residual {res:e} (alpha = {alpha})"
        )));
    }
    Ok(rho)
}
