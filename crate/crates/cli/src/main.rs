//! Batch front end: one run per invocation, one report per run.
//!
//! Exit status 0 on success (negative verdicts included), 1 on invalid
//! input or configuration, 2 on numerical failure.

mod config;
mod run;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{Command, CommonArgs, Format, RunConfig};

#[derive(Parser)]
#[command(
    name = "rhlab",
    version,
    about = "Multiplication-map ranks, monodromy and immersion experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Rank of the full multiplication map on a curve.
    Noether(CommonArgs),
    /// Random subspace scan of the restricted multiplication map.
    Lazarsfeld(CommonArgs),
    /// Injectivity criterion for a given or sampled system.
    Criterion(CommonArgs),
    /// Dimension formulas for a genus and Lie algebra.
    Dims(CommonArgs),
    /// Monodromy representation, traces and irreducibility probe.
    Monodromy(CommonArgs),
    /// Finite-difference rank of the monodromy map over a step ladder.
    Immersion(CommonArgs),
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn validation(message: String) -> Self {
        CliError { code: 1, message }
    }
}

impl From<rhlab::Error> for CliError {
    fn from(e: rhlab::Error) -> Self {
        CliError {
            code: if e.is_numerical() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::validation(format!("out: cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn run(command: Command, args: &CommonArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::resolve(command, args)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::validation(format!("threads: {e}")))?;
    }
    run::complete(&mut cfg)?;
    let outcome = run::execute(&cfg)?;
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let body = match (cfg.format, &outcome.csv) {
        (Format::Csv, Some(csv)) => csv.clone(),
        _ => {
            let report = json!({
                "tool": "rhlab",
                "version": env!("CARGO_PKG_VERSION"),
                "timestamp": timestamp,
                "command": command.name(),
                "config": cfg,
                "result": outcome.result,
                "numerical_failure": outcome.numerical_failure,
            });
            serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
        }
    };
    match &cfg.out {
        Some(path) => write_atomic(path, &body)?,
        None => print!("{body}"),
    }
    match outcome.numerical_failure {
        Some(msg) => Err(CliError { code: 2, message: msg }),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (command, args) = match &cli.command {
        Sub::Noether(a) => (Command::Noether, a),
        Sub::Lazarsfeld(a) => (Command::Lazarsfeld, a),
        Sub::Criterion(a) => (Command::Criterion, a),
        Sub::Dims(a) => (Command::Dims, a),
        Sub::Monodromy(a) => (Command::Monodromy, a),
        Sub::Immersion(a) => (Command::Immersion, a),
    };
    match run(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
