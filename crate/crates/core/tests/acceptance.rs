//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the lines are always printed.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use supercrit::algebra::{
    dilation_sq, hopf_map, morphism_residual, AlgebraElement, DilationCalibration, DilationModel, DivisionAlgebra,
    HopfPoint,
};
use supercrit::certify::{certify_doubly_starshaped, pohozaev_terms, ChiKind, Verdict};
use supercrit::geometry::{
    chi_eval, make_profile, rho_equation, solve_rho, ChiParams, KField, KFieldSpec, ProfileDomain, ProfileShape,
};
use supercrit::reduction::{
    hopf_reduce, lift, residual_transfer, RotationalSpec, TransferOptions, WeightedEllipticProblem,
};
use supercrit::solver::{
    mountain_pass_solve, nodal_domains, shoot_radial, sign_changing_solve, Interpolation, Reflection, SolveReport,
    SolverOptions,
};

const ALGEBRAS: [DivisionAlgebra; 4] = [
    DivisionAlgebra::Real,
    DivisionAlgebra::Complex,
    DivisionAlgebra::Quaternion,
    DivisionAlgebra::Octonion,
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

fn unit_disk() -> WeightedEllipticProblem {
    let disk = make_profile(
        ProfileShape::Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        },
        None,
    )
    .unwrap();
    WeightedEllipticProblem::plain(disk, 4.0).unwrap()
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(f)
}

/// Hopf-map norm identity and norm multiplicativity, 10⁴ points per algebra.
fn hopf_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_map, mut worst_mul) = (0.0f64, 0.0f64);
    for alg in ALGEBRAS {
        let d = alg.dim();
        for _ in 0..10_000 {
            let z = HopfPoint::from_coords(&uniform_vec(&mut rng, 2 * d, -1.0, 1.0)).unwrap();
            let image_norm = hopf_map(&z).iter().map(|c| c * c).sum::<f64>().sqrt();
            worst_map = worst_map.max((image_norm - z.norm_sqr()).abs() / z.norm_sqr());

            let a = AlgebraElement::new(uniform_vec(&mut rng, d, -1.0, 1.0)).unwrap();
            let b = AlgebraElement::new(uniform_vec(&mut rng, d, -1.0, 1.0)).unwrap();
            let prod = a.mul(&b).unwrap().norm();
            worst_mul = worst_mul.max((prod - a.norm() * b.norm()).abs() / (a.norm() * b.norm()));
        }
    }
    let t = start.elapsed();
    outcome(
        worst_map <= 1e-12 && worst_mul <= 1e-12 && t < Duration::from_secs(5),
        format!("max rel |π| error {worst_map:.2e}, max rel |ab| error {worst_mul:.2e}, {t:.2?} (limits 1e-12, 5 s)"),
    )
}

/// Random degree-4 polynomial in `n` variables: `(a·w)⁴ + (b·w)³ + |w|²(c·w) + w₀²`.
fn quartic(rng: &mut ChaCha8Rng, n: usize) -> impl Fn(&[f64]) -> f64 {
    let a = uniform_vec(rng, n, -1.0, 1.0);
    let b = uniform_vec(rng, n, -1.0, 1.0);
    let c = uniform_vec(rng, n, -1.0, 1.0);
    move |w: &[f64]| {
        let dot = |u: &[f64]| u.iter().zip(w).map(|(x, y)| x * y).sum::<f64>();
        let r2: f64 = w.iter().map(|x| x * x).sum();
        dot(&a).powi(4) + dot(&b).powi(3) + r2 * dot(&c) + w[0] * w[0]
    }
}

/// O(h²) decay of the harmonic-morphism residual with the calibrated constant.
fn morphism_identity() -> Outcome {
    let cal = DilationCalibration::run();
    println!(
        "    dilation oracle (v = |w|², complex): estimate {:.12}, adopted constant {}",
        cal.estimate, cal.constant
    );
    let model = DilationModel::calibrated();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let h = 1e-2;
    for alg in ALGEBRAS {
        let d = alg.dim();
        let v = quartic(&mut rng, d + 1);
        for _ in 0..100 {
            let z = HopfPoint::from_coords(&uniform_vec(&mut rng, 2 * d, -1.0, 1.0)).unwrap();
            let ratio = morphism_residual(&v, &z, h, &model) / morphism_residual(&v, &z, h / 2.0, &model);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    outcome(
        cal.constant == 4.0 && (3.5..=4.5).contains(&lo) && (3.5..=4.5).contains(&hi),
        format!(
            "dilation constant {}, halving ratios in [{lo:.4}, {hi:.4}] (required ⊂ [3.5, 4.5])",
            cal.constant
        ),
    )
}

fn disk_solve(h: f64) -> SolveReport {
    mountain_pass_solve(&unit_disk(), &SolverOptions::with_h(h)).unwrap()
}

/// Unit-disk solution against the radial shooting profile.
fn solver_vs_shooting(report: &SolveReport, elapsed: Duration) -> Outcome {
    let oracle = shoot_radial(2, 4.0, 1e-12).unwrap();
    let f = &report.field;
    let grid = f.grid();
    let err = (0..grid.inside_count())
        .map(|i| {
            let x = grid.inside_coords(i);
            (f.values()[i] - oracle.eval(x[0].hypot(x[1]))).abs()
        })
        .fold(0.0, f64::max);
    let rel = err / oracle.center_value;
    outcome(
        report.converged && rel <= 0.02 && elapsed < Duration::from_secs(60),
        format!(
            "h = 1/128: sup rel difference {rel:.2e}, centre value {:.6}, single-threaded {elapsed:.2?} (limits 2%, 60 s)",
            oracle.center_value
        ),
    )
}

/// Pohozaev identity with χ = x at h and h/2.
fn pohozaev(coarse: &SolveReport) -> Outcome {
    let problem = unit_disk();
    let k = KField::constant(1.0);
    let fine = disk_solve(1.0 / 256.0);
    let rc = pohozaev_terms(coarse, &problem, &ChiKind::Identity, &k)
        .unwrap()
        .relative_residual;
    let rf = pohozaev_terms(&fine, &problem, &ChiKind::Identity, &k)
        .unwrap()
        .relative_residual;
    outcome(
        rc <= 0.01 && rc / rf >= 1.5,
        format!(
            "relative residual {rc:.3e} at h = 1/128, {rf:.3e} at h = 1/256, improvement {:.2}x (limits 1%, 1.5x)",
            rc / rf
        ),
    )
}

/// Divergence and quadratic-form bound of the rotational vector field.
fn chi_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut div_err, mut eig_excess) = (0.0f64, f64::NEG_INFINITY);
    let mut exact = true;
    let step = 1e-5;
    for _ in 0..10 {
        let m = rng.gen_range(1..=3usize);
        let ks: Vec<u32> = (0..m).map(|_| rng.gen_range(0..=3)).collect();
        let taus = uniform_vec(&mut rng, m, 0.5, 3.0);
        let z = rng.gen_range(0..=2usize);
        let n = ks.iter().map(|k| *k as usize).sum::<usize>() + m + z;
        let params = ChiParams::new(taus.clone(), ks.clone(), n).unwrap();
        for _ in 0..10 {
            let mut x = uniform_vec(&mut rng, n, -2.0, 2.0);
            for (i, block) in params.blocks().into_iter().enumerate() {
                let dir = uniform_vec(&mut rng, block.len(), -1.0, 1.0);
                let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-3);
                let t = rng.gen_range(0.5..3.0) * taus[i];
                for (c, dc) in x[block].iter_mut().zip(dir) {
                    *c = t * dc / norm;
                }
            }
            let value = chi_eval(&x, &params).unwrap();
            exact &= value.divergence == (n - params.k_total()) as f64;
            let mut jac = DMatrix::<f64>::zeros(n, n);
            for j in 0..n {
                let (mut xp, mut xm) = (x.clone(), x.clone());
                xp[j] += step;
                xm[j] -= step;
                let (cp, cm) = (
                    chi_eval(&xp, &params).unwrap().vector,
                    chi_eval(&xm, &params).unwrap().vector,
                );
                for i in 0..n {
                    jac[(i, j)] = (cp[i] - cm[i]) / (2.0 * step);
                }
            }
            div_err = div_err.max((jac.trace() - value.divergence).abs());
            let sym = (&jac + jac.transpose()) * 0.5;
            let top = sym.symmetric_eigenvalues().max();
            eig_excess = eig_excess.max(top - value.quad_bound);
        }
    }
    outcome(
        exact && div_err <= 1e-6 && eig_excess <= 1e-6,
        format!(
            "closed-form divergence exact: {exact}; FD divergence error {div_err:.2e}; max(eig − bound) {eig_excess:.2e} (limits 1e-6)"
        ),
    )
}

/// Verdicts of the rotational certificate on the four fixture cases.
fn certificate_table() -> Outcome {
    let constant = KFieldSpec::Constant { value: 1.0 };
    let axial = KFieldSpec::AxialPower { power: 2.0 };
    type Case = (&'static str, fn() -> ProfileDomain, KFieldSpec, f64, f64, f64, Verdict);
    let cases: Vec<Case> = vec![
        (
            "ball, p = 6",
            ball_profile,
            constant.clone(),
            6.0,
            1.0,
            3.0,
            Verdict::Nonexistence,
        ),
        (
            "ball, p = 4",
            ball_profile,
            constant.clone(),
            4.0,
            1.0,
            3.0,
            Verdict::ExistenceSubcritical,
        ),
        (
            "dumbbell, p = 6",
            dumbbell_profile,
            constant.clone(),
            6.0,
            1.0,
            7.0,
            Verdict::Inconclusive,
        ),
        (
            "ball, K = |y|², p = 6",
            ball_profile,
            axial,
            6.0,
            1.0,
            3.0,
            Verdict::Inconclusive,
        ),
    ];
    let mut lines = vec![];
    let mut pass = true;
    for (name, profile, k, p, t0, t1, expected) in cases {
        let run = || {
            let spec = RotationalSpec::new(vec![1], 4, profile(), k.build().unwrap()).unwrap();
            certify_doubly_starshaped(&spec, p, t0, t1).unwrap()
        };
        let (first, second) = (run(), run());
        let stable = first.to_json().unwrap() == second.to_json().unwrap();
        let mut ok = stable && first.verdict == expected;
        if name.starts_with("dumbbell") {
            ok &= first.failed_checks.iter().any(|c| c == "doubly_starshaped");
        }
        if name.contains("K =") {
            ok &= first.failed_checks == ["k_monotonicity"];
        }
        pass &= ok;
        lines.push(format!(
            "{name} → {:?} {:?}{}",
            first.verdict,
            first.failed_checks,
            if stable { "" } else { " UNSTABLE" }
        ));
    }
    outcome(pass, lines.join("; "))
}

fn ball_profile() -> ProfileDomain {
    make_profile(
        ProfileShape::Ball {
            center: vec![2.0, 0.0, 0.0],
            radius: 1.0,
        },
        None,
    )
    .unwrap()
}

fn dumbbell_profile() -> ProfileDomain {
    make_profile(
        ProfileShape::Dumbbell {
            dimension: 3,
            first_center: 2.0,
            second_center: 6.0,
            radius: 1.0,
            neck_half_width: 0.1,
        },
        None,
    )
    .unwrap()
}

/// Radius of the ball in the product-of-spheres construction.
fn rho_construction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = rng.gen_range(1..=3usize);
        let ks: Vec<u32> = (0..m).map(|_| rng.gen_range(1..=3)).collect();
        let taus = uniform_vec(&mut rng, m, 0.5, 3.0);
        let z = rng.gen_range(3usize.saturating_sub(m)..=3);
        let n = ks.iter().map(|k| *k as usize).sum::<usize>() + m + z;
        let params = ChiParams::new(taus, ks, n).unwrap();
        let upper = (m + z) as f64 / 2.0;
        let alpha = rng.gen_range(1.0 + 1e-6..upper);
        let rho = solve_rho(alpha, &params).unwrap();
        worst = worst.max(rho_equation(rho, alpha, &params).unwrap().abs());
    }
    let params = ChiParams::new(vec![1.0], vec![1], 5).unwrap();
    let closed = (solve_rho(1.5, &params).unwrap() - (1.0 - 1.0 / 2f64.sqrt())).abs();
    outcome(
        worst <= 1e-10 && closed <= 1e-9,
        format!("max equation residual {worst:.2e} over 100 configurations (limit 1e-10); closed-form error {closed:.2e} (limit 1e-9)"),
    )
}

/// Centre values grow as p approaches the critical exponent in 3-D.
fn blow_up() -> Outcome {
    let start = Instant::now();
    let centres: Vec<f64> = [5.0, 5.5, 5.9, 5.99]
        .iter()
        .map(|p| shoot_radial(3, *p, 1e-10).unwrap().center_value)
        .collect();
    let increasing = centres.windows(2).all(|w| w[0] < w[1]);
    let critical = shoot_radial(3, 6.0, 1e-10);
    let t = start.elapsed();
    outcome(
        increasing && critical.is_err() && t < Duration::from_secs(10),
        format!(
            "centre values {centres:.4?}, p = 6 {}, {t:.2?} (limit 10 s)",
            match &critical {
                Ok(_) => "returned a solution".to_string(),
                Err(e) => format!("errors ({e})"),
            }
        ),
    )
}

/// Solve on a 3-D shell, lift to ℝ⁴ and compare residuals.
fn lift_transfer() -> Outcome {
    let shell = make_profile(
        ProfileShape::Shell {
            center: vec![0.0; 3],
            inner_radius: 1.0,
            outer_radius: 1.5,
        },
        None,
    )
    .unwrap();
    let model = DilationModel::calibrated();
    let a = 1.0;
    let problem = hopf_reduce(&shell, a, 4.0, &model).unwrap();
    let options = SolverOptions {
        symmetries: (0..3).map(|axis| Reflection { axis, plane: 0.0 }).collect(),
        ..SolverOptions::with_h(1.0 / 32.0)
    };
    let report = mountain_pass_solve(&problem, &options).unwrap();
    let lifted = lift(&report.field, &shell, Interpolation::CubicSpline).unwrap();
    let transfer = residual_transfer(&lifted, &problem, a, &model, &TransferOptions::default()).unwrap();
    let spot = &transfer.samples[0];
    let consistent = (spot.dilation_sq - dilation_sq(&HopfPoint::from_coords(&spot.point).unwrap(), &model)).abs()
        <= 1e-12 * spot.dilation_sq;
    outcome(
        report.converged && consistent && transfer.max_residual_error <= 0.05,
        format!(
            "reduced solve converged: {} ({} iterations); max relative residual mismatch {:.3e}, over {} points (limit 5%); pointwise Laplacian ratio error {:.3e} (diagnostic only, ill-conditioned where Δv ≈ 0)",
            report.converged,
            report.iterations,
            transfer.max_residual_error,
            transfer.samples.len(),
            transfer.max_laplacian_error,
        ),
    )
}

/// Odd solve under x₀ ↦ −x₀ against the positive solution.
fn sign_changing() -> Outcome {
    let problem = unit_disk();
    let options = SolverOptions::with_h(1.0 / 64.0);
    let positive = mountain_pass_solve(&problem, &options).unwrap();
    let odd = sign_changing_solve(&problem, Reflection { axis: 0, plane: 0.0 }, &options).unwrap();
    let domains = nodal_domains(&odd.field, 1e-3);
    outcome(
        positive.converged && odd.converged && domains >= 2 && odd.energy > positive.energy,
        format!(
            "converged: {}; nodal domains {domains}; energy {:.6} vs positive {:.6}",
            odd.converged, odd.energy, positive.energy
        ),
    )
}

fn main() {
    let mut failures = 0;
    let mut report = |n: usize, name: &str, o: Outcome| {
        println!("{} [{n:>2}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failures += usize::from(!o.pass);
    };
    report(1, "Hopf-map identities", hopf_identities());
    report(2, "harmonic-morphism residual", morphism_identity());
    let start = Instant::now();
    let disk = single_threaded(|| disk_solve(1.0 / 128.0));
    let elapsed = start.elapsed();
    report(3, "solver vs shooting", solver_vs_shooting(&disk, elapsed));
    report(4, "Pohozaev identity", pohozaev(&disk));
    report(5, "rotational field bounds", chi_lemma());
    report(6, "certificate truth table", certificate_table());
    report(7, "ball radius construction", rho_construction());
    report(8, "criticality blow-up", blow_up());
    report(9, "lift residual transfer", lift_transfer());
    report(10, "sign-changing solution", sign_changing());
    println!("{} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
