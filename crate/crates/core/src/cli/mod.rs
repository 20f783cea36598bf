//! Command-line front end: `darboux <command> --config run.json`.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 a trajectory or
//! analysis stopped at a singularity.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;

pub use commands::{catalog_listing, Outcome};
pub use config::{Metadata, Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "darboux", version, about = "Darboux curves on surfaces in principal charts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Integrate trajectories and write CSV + JSON per trajectory.
    Trace,
    /// Classify ridges (coordinate-plane catalog on quadrics).
    Ridges,
    /// Rotation numbers: quadrature tables and return maps on an ellipsoid.
    Rotation,
    /// Regime classification and trajectory bundles per level.
    Regimes,
    /// Canonical section of a trajectory in the space of spheres.
    Cansec,
    /// Integrability residuals of the Darboux plane field on a grid.
    Integrability,
    /// List built-in surfaces, flows and first integrals.
    Catalog,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Trace => "trace",
            Command::Ridges => "ridges",
            Command::Rotation => "rotation",
            Command::Regimes => "regimes",
            Command::Cansec => "cansec",
            Command::Integrability => "integrability",
            Command::Catalog => "catalog",
        }
    }
}

/// Exit status of a failed command.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameters(_) | Error::Io(_) | Error::OutOfDomain { .. } | Error::Empty(_) => 1,
        _ => 2,
    }
}

fn module(command: Command) -> &'static str {
    match command {
        Command::Trace => "darboux-flow",
        Command::Ridges => "ridge-analysis",
        Command::Rotation | Command::Regimes => "quadric-dynamics",
        Command::Cansec => "sphere-space",
        Command::Integrability => "darboux-flow",
        Command::Catalog => "surface-catalog",
    }
}

/// Runs one command against an already loaded configuration.
pub fn execute(command: Command, config: &RunConfig, jobs: usize) -> Result<Outcome, Error> {
    let out = config.out_dir();
    std::fs::create_dir_all(&out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    match command {
        Command::Trace => commands::trace(config, &out, jobs),
        Command::Ridges => commands::ridges(config, &out, jobs),
        Command::Rotation => commands::rotation(config, &out, jobs),
        Command::Regimes => commands::regimes(config, &out, jobs),
        Command::Cansec => commands::cansec(config, &out),
        Command::Integrability => commands::integrability(config, &out),
        Command::Catalog => {
            let path = out.join("catalog.json");
            let text = serde_json::to_string_pretty(&catalog_listing())? + "\n";
            std::fs::write(&path, text)?;
            Ok(Outcome { files: vec![path], singular: false })
        }
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    if cli.command == Command::Catalog && cli.config.is_none() {
        let listing = catalog_listing();
        println!("{}", serde_json::to_string_pretty(&listing).expect("listing serializes"));
        if let Some(out) = &cli.out {
            let cfg = RunConfig::parse(r#"{"surface": {"type": "ellipsoid"}}"#).expect("builtin config");
            let cfg = RunConfig { out: Some(out.clone()), ..cfg };
            if let Err(e) = execute(Command::Catalog, &cfg, 1) {
                eprintln!("error: {e}");
                return exit_code(&e);
            }
        }
        return 0;
    }
    let Some(path) = &cli.config else {
        eprintln!("error: --config is required for `{}`", cli.command.name());
        return 1;
    };
    let mut config = match RunConfig::load(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    config.apply(&Overrides { out: cli.out.clone(), seed: cli.seed, rel_tol: cli.rel_tol, abs_tol: cli.abs_tol });
    match execute(cli.command, &config, cli.jobs) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            if outcome.singular {
                eprintln!("warning: a trajectory stopped at a singularity; its output is flagged partial");
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {}: {e}", module(cli.command));
            exit_code(&e)
        }
    }
}

pub fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(run(Cli::parse()))
}
