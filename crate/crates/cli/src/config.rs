use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rhlab::curves::{Curve, PlaneQuartic};
use rhlab::systems::{DifferentialSystem, LieAlgebraData};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Noether,
    Lazarsfeld,
    Criterion,
    Dims,
    Monodromy,
    Immersion,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Noether => "noether",
            Command::Lazarsfeld => "lazarsfeld",
            Command::Criterion => "criterion",
            Command::Dims => "dims",
            Command::Monodromy => "monodromy",
            Command::Immersion => "immersion",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Fully resolved run configuration. Echoed verbatim into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub genus: Option<usize>,
    #[serde(default = "LieAlgebraData::sl2")]
    pub algebra: LieAlgebraData,
    #[serde(default)]
    pub curve: Option<Curve>,
    #[serde(default)]
    pub system: Option<DifferentialSystem>,
    #[serde(default = "default_bound")]
    pub coefficient_bound: u32,
    #[serde(default = "default_w_dim")]
    pub w_dim: usize,
    #[serde(default = "default_ode_tol")]
    pub ode_tol: f64,
    #[serde(default = "default_rank_rel_tol")]
    pub rank_rel_tol: f64,
    #[serde(default = "default_clearance")]
    pub clearance: f64,
    #[serde(default = "default_fd_steps")]
    pub fd_steps: Vec<f64>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_trials() -> usize {
    100
}
fn default_bound() -> u32 {
    2
}
fn default_w_dim() -> usize {
    3
}
fn default_ode_tol() -> f64 {
    1e-12
}
fn default_rank_rel_tol() -> f64 {
    1e-10
}
fn default_clearance() -> f64 {
    0.25
}
fn default_fd_steps() -> Vec<f64> {
    vec![1e-4, 1e-5, 1e-6]
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

#[derive(Clone, Debug, Default, Args)]
pub struct CommonArgs {
    /// JSON config file; inline flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker thread cap.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub genus: Option<usize>,
    /// sl2, gl2 or sl3.
    #[arg(long)]
    pub algebra: Option<String>,
    /// Integer branch points, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "quartic"
    )]
    pub branch_points: Option<Vec<i64>>,
    /// fermat or klein.
    #[arg(long)]
    pub quartic: Option<String>,
    /// JSON file holding a differential system.
    #[arg(long)]
    pub system: Option<PathBuf>,
    #[arg(long)]
    pub coefficient_bound: Option<u32>,
    #[arg(long)]
    pub w_dim: Option<usize>,
    #[arg(long)]
    pub ode_tol: Option<f64>,
    #[arg(long)]
    pub rank_rel_tol: Option<f64>,
    #[arg(long)]
    pub clearance: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub fd_steps: Option<Vec<f64>>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("{what}: cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("{what}: malformed JSON in {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(command: Command, args: &CommonArgs) -> Result<Self, CliError> {
        let mut cfg: RunConfig = match &args.config {
            Some(p) => read_json(p, "config")?,
            None => RunConfig::default(),
        };
        if let Some(c) = cfg.command {
            if c != command {
                return Err(CliError::validation(format!(
                    "command: config says {} but the subcommand is {}",
                    c.name(),
                    command.name()
                )));
            }
        }
        cfg.command = Some(command);
        macro_rules! take {
            ($($f:ident),*) => { $(if let Some(v) = args.$f.clone() { cfg.$f = v; })* };
        }
        take!(
            seed,
            trials,
            coefficient_bound,
            w_dim,
            ode_tol,
            rank_rel_tol,
            clearance,
            fd_steps,
            format
        );
        if args.genus.is_some() {
            cfg.genus = args.genus;
        }
        if args.out.is_some() {
            cfg.out = args.out.clone();
        }
        if args.threads.is_some() {
            cfg.threads = args.threads;
        }
        if let Some(name) = &args.algebra {
            cfg.algebra = serde_json::from_value(serde_json::Value::String(name.clone())).map_err(|_| {
                CliError::validation(format!("algebra: unknown algebra {name:?} (expected sl2, gl2 or sl3)"))
            })?;
        }
        if let Some(points) = &args.branch_points {
            cfg.curve =
                Some(Curve::hyperelliptic(points).map_err(|e| CliError::validation(format!("branch_points: {e}")))?);
        }
        if let Some(name) = &args.quartic {
            cfg.curve = Some(match name.as_str() {
                "fermat" => PlaneQuartic::fermat().into(),
                "klein" => PlaneQuartic::klein().into(),
                other => {
                    return Err(CliError::validation(format!(
                        "quartic: unknown family {other:?} (expected fermat or klein)"
                    )))
                }
            });
        }
        if let Some(p) = &args.system {
            cfg.system = Some(read_json(p, "system")?);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::validation(format!("{name} must be positive, got {v}")))
            }
        };
        positive("ode_tol", self.ode_tol)?;
        positive("rank_rel_tol", self.rank_rel_tol)?;
        positive("clearance", self.clearance)?;
        for &s in &self.fd_steps {
            positive("fd_steps", s)?;
        }
        if self.trials == 0 {
            return Err(CliError::validation("trials must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::validation("threads must be at least 1".into()));
        }
        if let (Some(sys), Some(curve)) = (&self.system, &self.curve) {
            if sys.curve() != curve {
                return Err(CliError::validation(
                    "system: its curve differs from the configured curve".into(),
                ));
            }
        }
        if let Some(sys) = &self.system {
            if sys.lie() != &self.algebra {
                return Err(CliError::validation(
                    "system: its algebra differs from the configured algebra".into(),
                ));
            }
        }
        Ok(())
    }
}
