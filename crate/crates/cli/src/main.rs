//! `scarlab`: simulate, diagnose and compile the scar models from the command line.

mod args;
mod compile;
mod config;
mod evolve;
mod io;
mod spectrum;
mod suites;
mod sweep;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum CliError {
    /// 2: invalid flags or configuration.
    Config(String),
    /// 3: problem size above a hard cap.
    Cap(String),
    /// 4: a compiled circuit misses its tolerance.
    Verify(String),
    /// 5: an invariant suite failed.
    Suite(String),
    /// 1: file system or other unexpected failure.
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Io(_) => 1,
            Self::Config(_) => 2,
            Self::Cap(_) => 3,
            Self::Verify(_) => 4,
            Self::Suite(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Config(m) | Self::Cap(m) | Self::Verify(m) | Self::Suite(m) | Self::Io(m) => m,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("SCARLAB_THREADS") else {
        return Ok(());
    };
    let k: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| CliError::Config(format!("SCARLAB_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    let cfg = match &cli.config {
        Some(path) => config::CliConfig::load(path)?,
        None => config::CliConfig::default(),
    };
    match cli.command {
        Command::Evolve(a) => evolve::run(&a, &cfg, cli.verbose),
        Command::Spectrum(a) => spectrum::run(&a, &cfg, cli.verbose),
        Command::Compile(a) => compile::run_compile(&a, &cfg, cli.verbose),
        Command::Prepare(a) => compile::run_prepare(&a, &cfg, cli.verbose),
        Command::Verify(a) => suites::run(&a, cli.verbose),
        Command::Sweep(a) => sweep::run(&a, &cfg, cli.verbose),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
