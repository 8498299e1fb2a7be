//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a requested check failed, 2 usage, config or
//! I/O error, 3 parameter or domain violation, 4 numerical failure.

pub mod commands;
pub mod config;
pub mod export;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;
pub use commands::Outcome;
pub use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "curvosc", version, about = "Anisotropic oscillator on curved surfaces")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed of the randomized checks; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; overrides the config, default `out`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a classical orbit and export trajectory CSVs.
    Simulate,
    /// Closed-form spectrum with degeneracy classes as JSON.
    Spectrum,
    /// Finite-difference eigenpairs against the closed form.
    Eigensolve,
    /// Seeded invariant suites, JSON report.
    Verify {
        /// Suite name or `all`.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Degeneracy classes and intra-class spreads.
    Degeneracies,
}

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_SAMPLES: usize = 100;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Io(_) => 2,
        Error::NewtonDivergence { .. } | Error::Eigen(_) | Error::Evaluation(_) => 4,
        _ => 3,
    }
}

fn execute(cli: &Cli) -> Result<Outcome, Error> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(|o| o.dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    match &cli.command {
        Command::Simulate => commands::simulate(&cfg, &out),
        Command::Spectrum => commands::spectrum(&cfg, &out),
        Command::Eigensolve => commands::eigensolve(&cfg, &out),
        Command::Degeneracies => commands::degeneracies(&cfg, &out),
        Command::Verify { suite } => {
            let vc = cfg.verify.clone().unwrap_or_default();
            let suite = suite.clone().or(vc.suite).unwrap_or_else(|| "all".into());
            let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
            let samples = vc.samples.unwrap_or(DEFAULT_SAMPLES);
            let report = verify::run(&suite, seed, samples)?;
            let file = export::write(&out, &format!("verify_{suite}.json"), &export::json(&report)?)?;
            let mut text = String::new();
            for s in &report.suites {
                text.push_str(&format!("{:<14} {}\n", s.name, if s.passed { "pass" } else { "FAIL" }));
                for c in s.checks.iter().filter(|c| !c.passed) {
                    text.push_str(&format!("    {} residual {:e} >= {:e}\n", c.name, c.residual, c.tolerance));
                }
            }
            Ok(Outcome { passed: report.passed, files: vec![file], report: text })
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if outcome.passed {
                0
            } else {
                eprintln!("error: a requested check failed");
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
