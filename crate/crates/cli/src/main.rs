//! `supercrit <command> --config <path>`: one command per process, every
//! artifact written under the output directory next to the resolved config.
//!
//! Exit status: 0 on success; 2 for configuration or hypothesis errors, with
//! no artifacts written except a certificate recording failed hypothesis
//! checks; 3 when the numerics did not reach tolerance (the last iterate is
//! still written).

mod commands;
mod config;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::{Artifacts, Failure};
use config::{Command, ConfigError, Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "supercrit",
    version,
    about = "Reductions, solves and certificates for supercritical elliptic problems"
)]
struct Cli {
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid spacing (overrides `solver.h`).
    #[arg(long)]
    h: Option<f64>,
    /// Exponent (overrides `p`).
    #[arg(long)]
    p: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match execute(&cli) {
        Ok((cfg, artifacts)) => {
            println!("{}: {}", cfg.command.expect("resolved"), artifacts.summary);
            println!("artifacts in {}", cfg.out_dir().display());
            match artifacts.status {
                2 => eprintln!("error: theorem hypotheses fail; see the certificate witnesses"),
                3 => eprintln!("error: tolerance not reached; artifacts hold the last iterate"),
                _ => {}
            }
            ExitCode::from(artifacts.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// `SUPERCRIT_THREADS` caps the solver's thread pool.
fn configure_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var("SUPERCRIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| ConfigError(format!("SUPERCRIT_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(e.to_string()))
}

fn execute(cli: &Cli) -> Result<(RunConfig, Artifacts), Failure> {
    let flags = Overrides {
        out: cli.out.clone(),
        seed: cli.seed,
        h: cli.h,
        p: cli.p,
    };
    let cfg = config::load(&cli.config)?.resolve(cli.command, &flags)?;
    let artifacts = commands::run(&cfg)?;
    write(&cfg, &artifacts)?;
    Ok((cfg, artifacts))
}

fn write(cfg: &RunConfig, artifacts: &Artifacts) -> Result<(), Failure> {
    let dir = cfg.out_dir();
    let io = |e: std::io::Error, what: &std::path::Path| {
        Failure::Library(supercrit::Error::Io(format!("{}: {e}", what.display())))
    };
    fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
    let echo = supercrit::json::to_stable_string(cfg)?;
    for (name, content) in
        std::iter::once(("config.resolved.json", &echo)).chain(artifacts.files.iter().map(|(n, c)| (n.as_str(), c)))
    {
        let path = dir.join(name);
        fs::write(&path, content).map_err(|e| io(e, &path))?;
    }
    Ok(())
}
