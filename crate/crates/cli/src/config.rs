use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use supercrit::algebra::DivisionAlgebra;
use supercrit::geometry::{KFieldSpec, ProfileShape};
use supercrit::solver::{Interpolation, Reflection};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyAlgebra,
    Reduce,
    Solve,
    Certify,
    Lift,
    Oracle,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

/// The whole run, as read from `--config` and then resolved: flags applied,
/// defaults filled in. The resolved form is what gets echoed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Exponent of the nonlinearity.
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub profile: Option<ProfileConfig>,
    #[serde(default)]
    pub problem: Option<ProblemConfig>,
    #[serde(default)]
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub algebra: Option<AlgebraConfig>,
    #[serde(default)]
    pub levels: Option<LevelsConfig>,
    #[serde(default)]
    pub certify: Option<CertifyConfig>,
    #[serde(default)]
    pub lift: Option<LiftConfig>,
    #[serde(default)]
    pub oracle: Option<OracleConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub shape: ProfileShape,
    /// Boundary samples per unit length/area; the generator default if absent.
    #[serde(default)]
    pub density: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    /// `−Δv = K|v|^{p−2}v` on the profile itself.
    Plain {
        #[serde(default)]
        coefficient: KFieldSpec,
    },
    /// Rotational reduction `−div(a∇v) = aK|v|^{p−2}v`, `a = Π x_i^{k_i}`.
    Rotational {
        multiplicities: Vec<u32>,
        ambient: usize,
        #[serde(default)]
        coefficient: KFieldSpec,
    },
    /// Hopf reduction of `−Δu + au = |u|^{p−2}u`; the profile is `U`.
    Hopf {
        #[serde(default)]
        a: f64,
        /// `c*` in `λ² = c*|π|`; the calibrated value if absent.
        #[serde(default)]
        dilation_constant: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub h: Option<f64>,
    /// Stopping tolerance on `sup|∇J|`; `1e−8·h^d` if absent.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_path_segments")]
    pub path_segments: usize,
    #[serde(default = "default_inner_tolerance")]
    pub inner_tolerance: f64,
    /// Search only among fields even under these reflections.
    #[serde(default)]
    pub symmetries: Vec<Reflection>,
    /// Solve for a field odd under this reflection instead of a positive one.
    #[serde(default)]
    pub sign_changing: Option<Reflection>,
    /// Warm-started continuation through these exponents (overrides `p`).
    #[serde(default)]
    pub exponents: Option<Vec<f64>>,
    /// Also evaluate the Pohozaev identity with `χ = x` (unweighted problems).
    #[serde(default)]
    pub pohozaev: bool,
}

fn default_max_iterations() -> usize {
    500
}
fn default_path_segments() -> usize {
    64
}
fn default_inner_tolerance() -> f64 {
    1e-3
}

impl Default for SolverConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all solver fields have defaults")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraConfig {
    #[serde(default = "all_algebras")]
    pub algebras: Vec<DivisionAlgebra>,
    /// Random points per algebra for the norm identities.
    #[serde(default = "default_identity_samples")]
    pub samples: usize,
    /// Random points per algebra for the harmonic-morphism residual.
    #[serde(default = "default_morphism_points")]
    pub morphism_points: usize,
    #[serde(default = "default_morphism_step")]
    pub morphism_step: f64,
}

fn all_algebras() -> Vec<DivisionAlgebra> {
    DivisionAlgebra::ALL.to_vec()
}
fn default_identity_samples() -> usize {
    10_000
}
fn default_morphism_points() -> usize {
    100
}
fn default_morphism_step() -> f64 {
    1e-2
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all algebra fields have defaults")
    }
}

/// Inputs of the compactness threshold and the level bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelsConfig {
    /// `min #Gx / K^{(M−2)/2}`; `null` for `+∞` (no finite orbits).
    pub min_orbit_weight: Option<f64>,
    #[serde(default = "default_sobolev")]
    pub sobolev_constant: f64,
    pub dimension: u32,
    /// Mountain-pass energies of disjoint subdomain problems.
    #[serde(default)]
    pub energies: Vec<f64>,
}

fn default_sobolev() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertifyConfig {
    /// Single rotated block over a doubly starshaped profile.
    DoublyStarshaped {
        multiplicities: Vec<u32>,
        ambient: usize,
        #[serde(default)]
        coefficient: KFieldSpec,
        t0: f64,
        t1: f64,
    },
    /// Product-of-spheres domain built around a ball profile.
    BallProduct {
        multiplicities: Vec<u32>,
        taus: Vec<f64>,
        epsilon: f64,
        ambient: usize,
    },
    /// Hopf-invariant solutions over the given profile.
    Hopf {
        algebra: DivisionAlgebra,
        #[serde(default)]
        n: usize,
        t0: f64,
        t1: f64,
        #[serde(default)]
        dilation_constant: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftConfig {
    #[serde(default = "default_interpolation")]
    pub interpolation: Interpolation,
    #[serde(default = "default_transfer_count")]
    pub samples: usize,
    /// Only points where the field exceeds this fraction of its maximum.
    #[serde(default = "default_floor")]
    pub floor: f64,
}

fn default_interpolation() -> Interpolation {
    Interpolation::CubicSpline
}
fn default_transfer_count() -> usize {
    100
}
fn default_floor() -> f64 {
    0.25
}

impl Default for LiftConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all lift fields have defaults")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleConfig {
    /// Measures the Hopf dilation constant.
    Dilation,
    /// Radial shooting on a ball.
    Shooting {
        dimension: usize,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "default_shooting_tol")]
        tol: f64,
    },
}

fn default_radius() -> f64 {
    1.0
}
fn default_shooting_tol() -> f64 {
    1e-10
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub h: Option<f64>,
    pub p: Option<f64>,
}

pub const DEFAULT_OUT: &str = "supercrit-out";
pub const DEFAULT_H: f64 = 1.0 / 64.0;

/// A configuration problem, reported with exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Reads and parses the file, pointing at the offending line on failure.
pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Err(ConfigError(format!("{}:1:1: configuration is empty", path.display())));
    }
    serde_json::from_str(&text).map_err(|e| {
        ConfigError(format!(
            "{}:{}:{}: {}",
            path.display(),
            e.line(),
            e.column(),
            strip_position(&e)
        ))
    })
}

/// serde_json appends " at line L column C"; the prefix already says it.
fn strip_position(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg,
    }
}

impl RunConfig {
    /// Applies flags and fills defaults that depend on the command.
    pub fn resolve(mut self, command: Command, flags: &Overrides) -> Result<Self, ConfigError> {
        if let Some(c) = self.command {
            if c != command {
                return Err(ConfigError(format!(
                    "config is for `{c}` but `{command}` was requested"
                )));
            }
        }
        self.command = Some(command);
        self.out = Some(
            flags
                .out
                .clone()
                .or(self.out)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        );
        self.seed = Some(flags.seed.or(self.seed).unwrap_or(0));
        self.p = flags.p.or(self.p);
        let needs_solver = matches!(command, Command::Solve | Command::Lift);
        if needs_solver {
            let mut s = self.solver.take().unwrap_or_default();
            s.h = Some(flags.h.or(s.h).unwrap_or(DEFAULT_H));
            self.solver = Some(s);
        } else if flags.h.is_some() {
            return Err(ConfigError(format!("--h has no effect on `{command}`")));
        }
        match command {
            Command::VerifyAlgebra => {
                self.algebra.get_or_insert_with(AlgebraConfig::default);
            }
            Command::Lift => {
                self.lift.get_or_insert_with(LiftConfig::default);
            }
            _ => {}
        }
        Ok(self)
    }

    pub fn out_dir(&self) -> &Path {
        self.out.as_deref().expect("resolved")
    }

    pub fn seed(&self) -> u64 {
        self.seed.expect("resolved")
    }

    pub fn exponent(&self) -> Result<f64, ConfigError> {
        self.p
            .ok_or_else(|| ConfigError(format!("`p` is required for `{}`", self.command.expect("resolved"))))
    }

    pub fn require<'a, T>(&self, section: &'a Option<T>, name: &str) -> Result<&'a T, ConfigError> {
        section.as_ref().ok_or_else(|| {
            ConfigError(format!(
                "section `{name}` is required for `{}`",
                self.command.expect("resolved")
            ))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let e = serde_json::from_str::<RunConfig>(r#"{"p": 4, "colour": 1}"#).unwrap_err();
        assert!(e.to_string().contains("unknown field `colour`"));
        let e = serde_json::from_str::<RunConfig>(r#"{"solver": {"h": 0.1, "hh": 2}}"#).unwrap_err();
        assert!(e.to_string().contains("unknown field `hh`"));
    }

    #[test]
    fn flags_override_file_values() {
        let cfg: RunConfig = serde_json::from_str(r#"{"p": 3, "seed": 5, "solver": {"h": 0.1}}"#).unwrap();
        let flags = Overrides {
            p: Some(4.0),
            h: Some(0.05),
            ..Overrides::default()
        };
        let r = cfg.resolve(Command::Solve, &flags).unwrap();
        assert_eq!(r.p, Some(4.0));
        assert_eq!(r.seed, Some(5));
        assert_eq!(r.solver.unwrap().h, Some(0.05));
        assert_eq!(r.out, Some(PathBuf::from(DEFAULT_OUT)));
    }

    #[test]
    fn mismatched_command_is_rejected() {
        let cfg: RunConfig = serde_json::from_str(r#"{"command": "certify"}"#).unwrap();
        assert!(cfg.resolve(Command::Solve, &Overrides::default()).is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"p": 4, "profile": {"shape": {"kind": "ball", "center": [0, 0], "radius": 1}}}"#)
                .unwrap();
        let r = cfg.resolve(Command::Solve, &Overrides::default()).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(
            back.clone().resolve(Command::Solve, &Overrides::default()).unwrap(),
            back
        );
    }
}
