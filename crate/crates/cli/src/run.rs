use rhlab::curves::Curve;
use rhlab::field::numeric_rank;
use rhlab::immersion::{fd_step_ladder, sample_center, ImmersionOptions, LadderReport};
use rhlab::monodromy::{
    build_loops, irreducibility_probe, monodromy_numeric, trace_vector, MonodromyOptions, NumericSystem,
};
use rhlab::multiplication::{
    criterion_injective, lazarsfeld_scan, noether_check, theta_matrix, ScanReport, SubspaceSelection,
};
use rhlab::systems::{dimension_report, dyad_detect, sample_system, DifferentialSystem};
use serde_json::{json, Value};

use crate::config::{Command, Format, RunConfig};
use crate::CliError;

/// Outcome of one subcommand: the result section, an optional CSV table,
/// and whether the run produced a numerically invalid result.
pub struct Outcome {
    pub result: Value,
    pub csv: Option<String>,
    pub numerical_failure: Option<String>,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome {
            result,
            csv: None,
            numerical_failure: None,
        }
    }
}

/// `y^2 = x (x - 1) ... (x - 2g)`.
pub fn default_curve(genus: usize) -> Result<Curve, CliError> {
    let pts: Vec<i64> = (0..=2 * genus as i64).collect();
    Curve::hyperelliptic(&pts).map_err(|e| CliError::validation(format!("genus: {e}")))
}

/// Branch points 0, 1, -6, 6, 12, -12, 18, ...: far enough apart that loops
/// at the default clearance keep monodromy norms moderate.
pub fn spread_curve(genus: usize) -> Result<Curve, CliError> {
    let mut pts = vec![0, 1, -6, 6];
    let mut k = 2;
    while pts.len() < 2 * genus + 1 {
        pts.extend([6 * k, -6 * k]);
        k += 1;
    }
    pts.truncate(2 * genus + 1);
    Curve::hyperelliptic(&pts).map_err(|e| CliError::validation(format!("genus: {e}")))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Fills in the curve and system the command will use, so the echoed config replays the run.
pub fn complete(cfg: &mut RunConfig) -> Result<(), CliError> {
    let command = cfg.command.expect("resolved");
    if let Some(sys) = &cfg.system {
        cfg.curve = Some(sys.curve().clone());
    }
    if let (Some(curve), Some(g)) = (&cfg.curve, cfg.genus) {
        if curve.genus() != g {
            return Err(CliError::validation(format!(
                "genus: {g} does not match the curve's genus {}",
                curve.genus()
            )));
        }
    }
    match command {
        Command::Dims => {
            cfg.genus = Some(cfg.genus.or(cfg.curve.as_ref().map(Curve::genus)).unwrap_or(2));
        }
        Command::Immersion if cfg.system.is_none() && cfg.curve.is_none() => {
            let g = cfg.genus.unwrap_or(2);
            cfg.system = Some(sample_center(g, cfg.seed, cfg.coefficient_bound)?);
        }
        _ => {}
    }
    if cfg.curve.is_none() && command != Command::Dims {
        cfg.curve = Some(match &cfg.system {
            Some(s) => s.curve().clone(),
            None if command == Command::Monodromy => spread_curve(cfg.genus.unwrap_or(2))?,
            None => default_curve(cfg.genus.unwrap_or(2))?,
        });
    }
    if matches!(command, Command::Criterion | Command::Monodromy | Command::Immersion) && cfg.system.is_none() {
        let curve = cfg.curve.as_ref().expect("set above");
        cfg.system = Some(sample_system(curve, &cfg.algebra, cfg.seed, cfg.coefficient_bound));
    }
    if command != Command::Dims {
        cfg.genus = cfg.curve.as_ref().map(Curve::genus);
    }
    let csv_ok = matches!(command, Command::Lazarsfeld | Command::Immersion);
    if cfg.format == Format::Csv && !csv_ok {
        return Err(CliError::validation(format!(
            "format: csv is only available for lazarsfeld and immersion, not {}",
            command.name()
        )));
    }
    Ok(())
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let curve = cfg.curve.as_ref();
    let system = cfg.system.as_ref();
    match cfg.command.expect("resolved") {
        Command::Dims => {
            let report = dimension_report(cfg.genus.expect("resolved"), &cfg.algebra)?;
            Ok(Outcome::ok(to_value(&report)))
        }
        Command::Noether => noether(curve.expect("resolved"), cfg),
        Command::Lazarsfeld => {
            let report = lazarsfeld_scan(curve.expect("resolved"), cfg.trials, cfg.w_dim, cfg.seed)?;
            let csv = (cfg.format == Format::Csv).then(|| scan_csv(&report));
            Ok(Outcome {
                result: to_value(&report),
                csv,
                numerical_failure: None,
            })
        }
        Command::Criterion => {
            let sys = system.expect("resolved");
            let verdict = criterion_injective(sys.curve(), sys)?;
            Ok(Outcome::ok(json!({
                "verdict": verdict,
                "dyad": dyad_detect(sys),
            })))
        }
        Command::Monodromy => monodromy(system.expect("resolved"), cfg),
        Command::Immersion => {
            let opts = ImmersionOptions {
                fd_step: cfg.fd_steps.iter().cloned().fold(f64::INFINITY, f64::min),
                ode_tol: cfg.ode_tol,
                clearance: cfg.clearance,
            };
            let ladder = fd_step_ladder(system.expect("resolved"), &cfg.fd_steps, &opts)?;
            let csv = (cfg.format == Format::Csv).then(|| ladder_csv(&ladder));
            Ok(Outcome {
                result: to_value(&ladder),
                csv,
                numerical_failure: None,
            })
        }
    }
}

fn noether(curve: &Curve, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let verdict = noether_check(curve)?;
    let theta = theta_matrix(curve, &SubspaceSelection::full(curve))?;
    let numeric = numeric_rank(&theta.matrix.to_float(), cfg.rank_rel_tol)?;
    Ok(Outcome::ok(json!({
        "verdict": verdict,
        "numeric_rank": numeric.rank,
        "singular_values": numeric.singular_values,
        "ranks_agree": numeric.rank == verdict.rank,
    })))
}

fn monodromy(sys: &DifferentialSystem, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let h = sys
        .curve()
        .as_hyperelliptic()
        .ok_or_else(|| CliError::validation("curve: monodromy needs a hyperelliptic curve".into()))?;
    let loops = build_loops(h, cfg.clearance)?;
    let numeric = NumericSystem::from_exact(sys)?;
    let (rep, _) = monodromy_numeric(&numeric, &loops, &MonodromyOptions::with_tol(cfg.ode_tol), None)?;
    let traces = trace_vector(&rep).ok();
    let probe = rep.valid.then(|| irreducibility_probe(&rep));
    let failure = (!rep.valid).then(|| {
        format!(
            "monodromy invalid: relation residual {:.3e}, det residuals {:?}, rounding floor {:.3e}",
            rep.relation_residual, rep.det_residuals, rep.rounding_floor
        )
    });
    Ok(Outcome {
        result: json!({
            "loops": loops,
            "representation": rep,
            "traces": traces,
            "irreducibility": probe,
            "dyad": dyad_detect(sys),
        }),
        csv: None,
        numerical_failure: failure,
    })
}

fn scan_csv(report: &ScanReport) -> String {
    let mut out = String::from("trial,rank,target_dimension,surjective\n");
    for (t, r) in report.ranks.iter().enumerate() {
        out.push_str(&format!(
            "{t},{r},{},{}\n",
            report.target_dimension,
            *r == report.target_dimension
        ));
    }
    out
}

fn ladder_csv(ladder: &LadderReport) -> String {
    let mut out = String::from("fd_step,index,singular_value,estimated_rank\n");
    for r in &ladder.reports {
        for (i, s) in r.singular_values.iter().enumerate() {
            out.push_str(&format!(
                "{:e},{},{:e},{}\n",
                r.options.fd_step,
                i + 1,
                s,
                r.estimated_rank
            ));
        }
    }
    out
}
