use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use supercrit::algebra::{
    hopf_map, morphism_residual, AlgebraElement, DilationCalibration, DilationModel, DivisionAlgebra, HopfPoint,
};
use supercrit::certify::{certify_ball_product, certify_doubly_starshaped, certify_hopf, pohozaev_terms, ChiKind};
use supercrit::geometry::{make_profile, KFieldSpec, ProfileDomain};
use supercrit::json::to_stable_string;
use supercrit::reduction::{
    constant_fn, critical_exponent, hopf_reduce, level_bound, lift, ps_threshold, residual_transfer, symmetry_reduce,
    OrbitData, RotationalSpec, ScalarFn, TransferOptions, WeightedEllipticProblem,
};
use supercrit::solver::{
    continuation_in_p, field_to_csv, field_to_pgm, mountain_pass_solve, nodal_domains, shoot_radial_on_ball,
    sign_changing_solve, SolveReport, SolverOptions,
};
use supercrit::{Error, Extended, Rational};

use crate::config::{
    AlgebraConfig, CertifyConfig, Command, ConfigError, LevelsConfig, OracleConfig, ProblemConfig, RunConfig,
};

/// Why a run stopped, mapped onto the exit-status contract.
#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Library(Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Library(Error::NotConverged(_)) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "{e}"),
            Failure::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

/// Files to write, relative to the output directory, and the exit status
/// of a run that produced them: 2 when a certificate records failed
/// hypotheses, 3 when the numerics did not reach their tolerances.
pub struct Artifacts {
    pub files: Vec<(String, String)>,
    pub status: u8,
    pub summary: String,
}

impl Artifacts {
    fn new(summary: impl Into<String>) -> Self {
        Self {
            files: Vec::new(),
            status: 0,
            summary: summary.into(),
        }
    }

    fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        self.files.push((name.to_string(), to_stable_string(value)?));
        Ok(())
    }

    fn converged(&mut self, ok: bool) {
        if !ok {
            self.status = 3;
        }
    }

    fn text(&mut self, name: &str, content: String) {
        self.files.push((name.to_string(), content));
    }
}

type Outcome = Result<Artifacts, Failure>;

/// Computes every artifact in memory; nothing touches the disk here.
pub fn run(cfg: &RunConfig) -> Outcome {
    match cfg.command.expect("resolved") {
        Command::VerifyAlgebra => verify_algebra(cfg),
        Command::Reduce => reduce(cfg),
        Command::Solve => solve(cfg),
        Command::Certify => certify(cfg),
        Command::Lift => lift_command(cfg),
        Command::Oracle => oracle(cfg),
    }
}

fn profile(cfg: &RunConfig) -> Result<ProfileDomain, Failure> {
    let p = cfg.require(&cfg.profile, "profile")?;
    Ok(make_profile(p.shape.clone(), p.density)?)
}

fn dilation_model(constant: Option<f64>) -> Result<DilationModel, Failure> {
    Ok(match constant {
        Some(c) => DilationModel::new(c)?,
        None => DilationModel::calibrated(),
    })
}

fn exact(n: usize, k: usize) -> Result<Extended<Rational>, Failure> {
    Ok(critical_exponent::<Rational>(n as i64, k as i64)?)
}

fn exponent_json(n: usize, k: usize) -> Result<Value, Failure> {
    let e = exact(n, k)?;
    Ok(json!({
        "ambient": n,
        "k": k,
        "exact": e.to_string(),
        "value": e.map(|r| *r.numer() as f64 / *r.denom() as f64),
    }))
}

/// The reduced problem and the ambient `(N, k)` it came from, if any.
fn build_problem(cfg: &RunConfig, p: f64) -> Result<(WeightedEllipticProblem, Option<(usize, usize)>), Failure> {
    let domain = profile(cfg)?;
    let default = ProblemConfig::Plain {
        coefficient: KFieldSpec::default(),
    };
    Ok(match cfg.problem.as_ref().unwrap_or(&default) {
        ProblemConfig::Plain { coefficient } => {
            let k = coefficient.build()?;
            let description = format!("-Δv = K|v|^(p-2)v, K = {}", k.label);
            let q: ScalarFn = Arc::new(move |x: &[f64]| k.eval(x));
            let problem = WeightedEllipticProblem::new(domain, constant_fn(1.0), q, constant_fn(0.0), p, description)?;
            (problem, None)
        }
        ProblemConfig::Rotational {
            multiplicities,
            ambient,
            coefficient,
        } => {
            let spec = RotationalSpec::new(multiplicities.clone(), *ambient, domain, coefficient.build()?)?;
            let nk = (spec.ambient, spec.k_total());
            (symmetry_reduce(&spec, p)?, Some(nk))
        }
        ProblemConfig::Hopf { a, dilation_constant } => {
            let model = dilation_model(*dilation_constant)?;
            let dim = domain.dimension().saturating_sub(1);
            (hopf_reduce(&domain, *a, p, &model)?, Some((2 * dim, dim - 1)))
        }
    })
}

fn solver_options(cfg: &RunConfig) -> SolverOptions {
    let s = cfg.solver.as_ref().expect("resolved");
    SolverOptions {
        h: s.h.expect("resolved"),
        tolerance: s.tolerance,
        max_iterations: s.max_iterations,
        seed: cfg.seed(),
        path_segments: s.path_segments,
        inner_tolerance: s.inner_tolerance,
        initial: None,
        symmetries: s.symmetries.clone(),
    }
}

fn report_json(report: &SolveReport, options: &SolverOptions) -> Value {
    json!({
        "summary": report.summary(),
        "h": options.h,
        "tolerance": report.tolerance,
        "insideNodes": report.field.grid().inside_count(),
        "fieldMin": report.field.min(),
        "fieldMax": report.field.max(),
        "nodalDomains": nodal_domains(&report.field, 1e-3),
    })
}

/// CSV always; a heatmap when the field is 2-D or 3-D.
fn push_field(out: &mut Artifacts, report: &SolveReport) -> Result<(), Failure> {
    out.text("field.csv", field_to_csv(&report.field));
    if matches!(report.field.grid().dim(), 2 | 3) {
        out.text("field.pgm", field_to_pgm(&report.field)?);
    }
    Ok(())
}

fn verify_algebra(cfg: &RunConfig) -> Outcome {
    let a: &AlgebraConfig = cfg.algebra.as_ref().expect("resolved");
    if a.algebras.is_empty() || a.samples == 0 {
        return Err(ConfigError("`algebra.algebras` and `algebra.samples` must be non-empty".into()).into());
    }
    if !(a.morphism_step > 0.0 && a.morphism_step.is_finite()) {
        return Err(ConfigError("`algebra.morphism_step` must be positive".into()).into());
    }
    let calibration = DilationCalibration::run();
    let model = DilationModel::new(calibration.constant)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let mut rows = Vec::new();
    let mut pass = true;
    for &alg in &a.algebras {
        let row = algebra_row(alg, a, &model, &mut rng)?;
        pass &= row.pass;
        rows.push(row);
    }
    let mut out = Artifacts::new(format!(
        "{} algebras checked, dilation constant {}",
        rows.len(),
        calibration.constant
    ));
    out.converged(pass);
    out.json(
        "algebra.json",
        &json!({
            "pass": pass,
            "identityTolerance": IDENTITY_TOL,
            "ratioWindow": RATIO_WINDOW,
            "calibration": calibration,
            "algebras": rows,
        }),
    )?;
    Ok(out)
}

const IDENTITY_TOL: f64 = 1e-12;
/// Halving the difference step must divide the morphism residual by ~4.
const RATIO_WINDOW: [f64; 2] = [3.5, 4.5];

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct AlgebraRow {
    algebra: DivisionAlgebra,
    dimension: usize,
    associative: bool,
    max_rel_hopf_norm_error: f64,
    max_rel_product_norm_error: f64,
    min_halving_ratio: f64,
    max_halving_ratio: f64,
    pass: bool,
}

fn uniform(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn algebra_row(
    alg: DivisionAlgebra,
    a: &AlgebraConfig,
    model: &DilationModel,
    rng: &mut ChaCha8Rng,
) -> Result<AlgebraRow, Failure> {
    let d = alg.dim();
    let (mut hopf_err, mut mul_err) = (0.0f64, 0.0f64);
    for _ in 0..a.samples {
        let z = HopfPoint::from_coords(&uniform(rng, 2 * d))?;
        let image = hopf_map(&z).iter().map(|c| c * c).sum::<f64>().sqrt();
        hopf_err = hopf_err.max((image - z.norm_sqr()).abs() / z.norm_sqr());
        let x = AlgebraElement::new(uniform(rng, d))?;
        let y = AlgebraElement::new(uniform(rng, d))?;
        let scale = x.norm() * y.norm();
        mul_err = mul_err.max((x.mul(&y)?.norm() - scale).abs() / scale);
    }
    // A random quartic on ℝ^{d+1}: the residual of the morphism identity is
    // pure O(h²) truncation for it, so halving h divides it by four.
    let (c1, c2, c3) = (uniform(rng, d + 1), uniform(rng, d + 1), uniform(rng, d + 1));
    let v = move |w: &[f64]| {
        let dot = |u: &[f64]| u.iter().zip(w).map(|(x, y)| x * y).sum::<f64>();
        let r2: f64 = w.iter().map(|x| x * x).sum();
        dot(&c1).powi(4) + dot(&c2).powi(3) + r2 * dot(&c3) + w[0] * w[0]
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let h = a.morphism_step;
    for _ in 0..a.morphism_points {
        let z = HopfPoint::from_coords(&uniform(rng, 2 * d))?;
        let ratio = morphism_residual(&v, &z, h, model) / morphism_residual(&v, &z, h / 2.0, model);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let ratios_ok = a.morphism_points == 0 || (RATIO_WINDOW[0] <= lo && hi <= RATIO_WINDOW[1]);
    Ok(AlgebraRow {
        algebra: alg,
        dimension: d,
        associative: alg.is_associative(),
        max_rel_hopf_norm_error: hopf_err,
        max_rel_product_norm_error: mul_err,
        min_halving_ratio: lo,
        max_halving_ratio: hi,
        pass: hopf_err <= IDENTITY_TOL && mul_err <= IDENTITY_TOL && ratios_ok,
    })
}

fn levels_json(levels: &LevelsConfig) -> Result<Value, Failure> {
    let weight = levels.min_orbit_weight.map_or(Extended::PosInfinity, Extended::Finite);
    let orbit = OrbitData::new(weight, levels.sobolev_constant, levels.dimension)?;
    let bound = if levels.energies.is_empty() {
        None
    } else {
        Some(level_bound(&levels.energies, &orbit)?)
    };
    Ok(json!({
        "orbit": orbit,
        "compactnessThreshold": ps_threshold(&orbit),
        "bubbleEnergy": orbit.bubble_energy(),
        "levelBound": bound,
        "note": "levelBound gives upper bounds only",
    }))
}

fn reduce(cfg: &RunConfig) -> Outcome {
    let p = cfg.exponent()?;
    let (problem, nk) = build_problem(cfg, p)?;
    let domain = &problem.domain;
    let critical = match nk {
        Some((n, k)) => exponent_json(n, k)?,
        None if domain.dimension() >= 3 => exponent_json(domain.dimension(), 0)?,
        None => json!({ "ambient": domain.dimension(), "k": 0, "exact": "+inf", "value": "+inf" }),
    };
    let samples: Vec<Value> = domain
        .interior_samples(5)
        .into_iter()
        .map(|x| {
            json!({
                "point": x,
                "weight": (problem.weight)(&x),
                "coefficient": (problem.coefficient)(&x),
                "linearTerm": (problem.linear_term)(&x),
            })
        })
        .collect();
    let levels = cfg.levels.as_ref().map(levels_json).transpose()?;
    let mut out = Artifacts::new(problem.description.clone());
    out.json(
        "reduced_problem.json",
        &json!({
            "description": problem.description,
            "dimension": problem.dimension(),
            "p": p,
            "criticalExponent": critical,
            "profile": { "shape": domain.shape(), "density": domain.density() },
            "samples": samples,
            "levels": levels,
        }),
    )?;
    Ok(out)
}

fn solve(cfg: &RunConfig) -> Outcome {
    let s = cfg.solver.as_ref().expect("resolved");
    let options = solver_options(cfg);
    if let Some(exponents) = &s.exponents {
        if s.sign_changing.is_some() || s.pohozaev {
            return Err(
                ConfigError("`solver.exponents` cannot be combined with `sign_changing` or `pohozaev`".into()).into(),
            );
        }
        let first = *exponents
            .first()
            .ok_or_else(|| ConfigError("`solver.exponents` is empty".into()))?;
        let (problem, _) = build_problem(cfg, first)?;
        let reports = continuation_in_p(&problem, exponents, &options)?;
        let last = reports.last().expect("non-empty");
        let mut out = Artifacts::new(format!("continuation through {} exponents", reports.len()));
        out.converged(reports.iter().all(|r| r.converged));
        let steps: Vec<Value> = reports.iter().map(|r| report_json(r, &options)).collect();
        out.json("report.json", &json!({ "continuation": steps }))?;
        push_field(&mut out, last)?;
        return Ok(out);
    }
    let p = cfg.exponent()?;
    let (problem, _) = build_problem(cfg, p)?;
    let report = match s.sign_changing {
        Some(r) => sign_changing_solve(&problem, r, &options)?,
        None => mountain_pass_solve(&problem, &options)?,
    };
    let mut out = Artifacts::new(format!(
        "energy {:.6e}, {} iterations, converged {}",
        report.energy, report.iterations, report.converged
    ));
    out.converged(report.converged);
    out.json("report.json", &report_json(&report, &options))?;
    push_field(&mut out, &report)?;
    if s.pohozaev {
        let coefficient = match &cfg.problem {
            None => KFieldSpec::default(),
            Some(ProblemConfig::Plain { coefficient }) => coefficient.clone(),
            Some(_) => return Err(ConfigError("`solver.pohozaev` needs a plain problem".into()).into()),
        };
        if !report.converged {
            return Err(Error::NotConverged("the Pohozaev identity needs a converged solution".into()).into());
        }
        let terms = pohozaev_terms(&report, &problem, &ChiKind::Identity, &coefficient.build()?)?;
        out.json("pohozaev.json", &terms)?;
    }
    Ok(out)
}

fn certify(cfg: &RunConfig) -> Outcome {
    let p = cfg.exponent()?;
    let section = cfg.require(&cfg.certify, "certify")?;
    let mut extra = None;
    let certificate = match section {
        CertifyConfig::DoublyStarshaped {
            multiplicities,
            ambient,
            coefficient,
            t0,
            t1,
        } => {
            let spec = RotationalSpec::new(multiplicities.clone(), *ambient, profile(cfg)?, coefficient.build()?)?;
            certify_doubly_starshaped(&spec, p, *t0, *t1)?
        }
        CertifyConfig::BallProduct {
            multiplicities,
            taus,
            epsilon,
            ambient,
        } => {
            if cfg.profile.is_some() {
                return Err(ConfigError("`ball_product` constructs its own profile; remove `profile`".into()).into());
            }
            let built = certify_ball_product(multiplicities, taus, *epsilon, p, *ambient)?;
            extra = Some(json!({
                "alpha": built.alpha,
                "rho": built.rho,
                "center": built.center,
                "profile": built.profile.to_json(),
            }));
            built.certificate
        }
        CertifyConfig::Hopf {
            algebra,
            n,
            t0,
            t1,
            dilation_constant,
        } => {
            let model = dilation_model(*dilation_constant)?;
            certify_hopf(&profile(cfg)?, *algebra, *n, p, *t0, *t1, &model)?
        }
    };
    let mut out = Artifacts::new(format!("verdict {:?}", certificate.verdict));
    if !certificate.failed_checks.is_empty() {
        out.summary = format!(
            "{}, failed checks: {}",
            out.summary,
            certificate.failed_checks.join(", ")
        );
        out.status = 2;
    }
    out.text("certificate.json", certificate.to_json()?);
    if let Some(extra) = extra {
        out.json("constructed_profile.json", &extra)?;
    }
    Ok(out)
}

fn lift_command(cfg: &RunConfig) -> Outcome {
    let p = cfg.exponent()?;
    let (a, constant) = match &cfg.problem {
        Some(ProblemConfig::Hopf { a, dilation_constant }) => (*a, *dilation_constant),
        _ => return Err(ConfigError("`lift` needs a problem of kind `hopf`".into()).into()),
    };
    let s = cfg.solver.as_ref().expect("resolved");
    if s.exponents.is_some() || s.sign_changing.is_some() || s.pohozaev {
        return Err(ConfigError("`lift` takes a single positive solve".into()).into());
    }
    let model = dilation_model(constant)?;
    let (problem, _) = build_problem(cfg, p)?;
    let options = solver_options(cfg);
    let report = mountain_pass_solve(&problem, &options)?;
    let mut out = Artifacts::new(String::new());
    out.converged(report.converged);
    out.json("report.json", &report_json(&report, &options))?;
    push_field(&mut out, &report)?;
    let l = cfg.lift.as_ref().expect("resolved");
    let lifted = lift(&report.field, &problem.domain, l.interpolation)?;
    let transfer = residual_transfer(
        &lifted,
        &problem,
        a,
        &model,
        &TransferOptions {
            count: l.samples,
            seed: cfg.seed(),
            floor: l.floor,
            ..TransferOptions::default()
        },
    )?;
    out.summary = format!(
        "lifted to ℝ^{}, max relative residual difference {:.3e}",
        lifted.ambient_dimension(),
        transfer.max_residual_error
    );
    out.json(
        "transfer.json",
        &json!({
            "algebra": lifted.algebra(),
            "ambientDimension": lifted.ambient_dimension(),
            "a": a,
            "dilationConstant": model.constant,
            "interpolation": l.interpolation,
            "transfer": transfer,
        }),
    )?;
    Ok(out)
}

fn oracle(cfg: &RunConfig) -> Outcome {
    match cfg.require(&cfg.oracle, "oracle")? {
        OracleConfig::Dilation => {
            let cal = DilationCalibration::run();
            let mut out = Artifacts::new(format!("dilation constant {}", cal.constant));
            out.json("oracle.json", &cal)?;
            Ok(out)
        }
        OracleConfig::Shooting { dimension, radius, tol } => {
            let p = cfg.exponent()?;
            let sol = shoot_radial_on_ball(*dimension, p, *radius, *tol)?;
            let mut out = Artifacts::new(format!("centre value {:.12e}", sol.center_value));
            out.json(
                "oracle.json",
                &json!({
                    "dimension": sol.dimension,
                    "p": sol.exponent,
                    "radius": sol.radius,
                    "centerValue": sol.center_value,
                    "boundaryMiss": sol.boundary_miss,
                }),
            )?;
            let mut csv = String::from("r,v,dv\n");
            for s in &sol.profile {
                csv.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", s.r, s.v, s.dv));
            }
            out.text("radial_profile.csv", csv);
            Ok(out)
        }
    }
}
