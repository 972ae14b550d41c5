//! Finite-difference rank of the monodromy map near a system.
//!
//! Coordinates around a center: the finite branch points other than the
//! first two (those two and infinity are held fixed), and the (H, E, F)
//! components of the coefficient matrices. The gauge slice holds three
//! coefficient components fixed: E and F of `B_1`, and H of `B_2`. Loops and
//! integration meshes are frozen at the center, so every perturbed run
//! integrates the same discrete scheme.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::field::{complex_pairs, ExactMatrix, ExactScalar, FloatMatrix};
use crate::monodromy::{
    build_loops, irreducibility_probe, monodromy_numeric, trace_values, word_list, IrreducibilityVerdict, LoopSystem,
    Mesh, MonodromyOptions, MonodromyRepresentation, NumericSystem, Word,
};
use crate::multiplication::{criterion_injective, CriterionVerdict};
use crate::systems::{dimension_report, dyad_detect, sample_system, DifferentialSystem, DyadVerdict, LieAlgebraData};

/// Frozen (Lie basis row, differential column) entries: E and F of `B_1`, H of `B_2`.
pub const SLICE_FROZEN: [(usize, usize); 3] = [(1, 0), (2, 0), (0, 1)];

/// Relative floor below which singular values are not considered for the rank.
pub const GAP_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystCoordinates {
    #[serde(with = "complex_pairs")]
    pub fixed_branch_points: Vec<Complex64>,
    #[serde(with = "complex_pairs")]
    pub moving_branch_points: Vec<Complex64>,
    /// Components H, E, F (rows) of each coefficient matrix `B_i` (columns), row-major.
    #[serde(with = "complex_pairs")]
    pub coefficients: Vec<Complex64>,
}

impl SystCoordinates {
    pub fn from_system(system: &DifferentialSystem) -> Result<Self> {
        let sys = NumericSystem::from_exact(system)?;
        let bp = sys.branch_points();
        let g = sys.genus();
        let comps = sys.sl2_components();
        let coefficients = (0..3).flat_map(|j| comps.iter().map(move |c| c[j])).collect::<Vec<_>>();
        debug_assert_eq!(coefficients.len(), 3 * g);
        Ok(SystCoordinates {
            fixed_branch_points: bp[..2].to_vec(),
            moving_branch_points: bp[2..].to_vec(),
            coefficients,
        })
    }

    pub fn genus(&self) -> usize {
        self.coefficients.len() / 3
    }

    /// Moving branch points followed by all coefficient components.
    pub fn ambient(&self) -> Vec<Complex64> {
        self.moving_branch_points
            .iter()
            .chain(&self.coefficients)
            .copied()
            .collect()
    }

    /// Positions in `ambient()` that stay free in the gauge slice.
    pub fn slice_indices(&self) -> Vec<usize> {
        let m = self.moving_branch_points.len();
        let g = self.genus();
        let frozen: Vec<usize> = SLICE_FROZEN.iter().map(|&(j, i)| m + j * g + i).collect();
        (0..m + 3 * g).filter(|k| !frozen.contains(k)).collect()
    }

    /// Free complex parameters in the slice: `(2g - 1) + (3g - 3)`.
    pub fn free_count(&self) -> usize {
        self.slice_indices().len()
    }

    pub fn system_at(&self, ambient: &[Complex64]) -> Result<NumericSystem> {
        let m = self.moving_branch_points.len();
        let g = self.genus();
        let bp: Vec<Complex64> = self.fixed_branch_points.iter().chain(&ambient[..m]).copied().collect();
        let c = &ambient[m..];
        let comps: Vec<[Complex64; 3]> = (0..g).map(|i| [c[i], c[g + i], c[2 * g + i]]).collect();
        NumericSystem::from_sl2_components(bp, &comps)
    }

    fn direction_label(&self, k: usize, imaginary: bool) -> String {
        let m = self.moving_branch_points.len();
        let g = self.genus();
        let part = if imaginary { "im" } else { "re" };
        if k < m {
            format!("{part} branch point {}", k + 2)
        } else {
            let c = k - m;
            format!("{part} {} component of B_{}", ["H", "E", "F"][c / g], c % g + 1)
        }
    }
}

/// True when the frozen entries cut the gauge orbit transversally: the map
/// `X -> ([X, B_1]_E, [X, B_1]_F, [X, B_2]_H)` on sl2 is invertible.
pub fn slice_regular(system: &DifferentialSystem) -> bool {
    let lie = system.lie();
    if !lie.is_sl2() || system.coefficients().cols() < 2 {
        return false;
    }
    let col = |i: usize| system.coefficients().column(i);
    let (b1, b2) = (col(0), col(1));
    let unit = |k: usize| {
        (0..3)
            .map(|j| ExactScalar::from_int((j == k) as i64))
            .collect::<Vec<_>>()
    };
    let m = ExactMatrix::from_fn(3, 3, |row, k| {
        let x = unit(k);
        match row {
            0 => lie.bracket(&x, &b1)[1].clone(),
            1 => lie.bracket(&x, &b1)[2].clone(),
            _ => lie.bracket(&x, &b2)[0].clone(),
        }
    });
    m.rank() == 3
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImmersionOptions {
    pub fd_step: f64,
    pub ode_tol: f64,
    pub clearance: f64,
}

impl Default for ImmersionOptions {
    fn default() -> Self {
        ImmersionOptions {
            fd_step: 1e-5,
            ode_tol: 1e-12,
            clearance: 0.25,
        }
    }
}

impl ImmersionOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.clearance > 0.0 && self.clearance.is_finite()) {
            return Err(Error::Parameter {
                name: "clearance",
                reason: format!("{} is not positive", self.clearance),
            });
        }
        if !(self.fd_step > 0.0 && self.fd_step < self.clearance / 4.0) {
            return Err(Error::Parameter {
                name: "fd_step",
                reason: format!(
                    "{} must lie in (0, clearance/4 = {})",
                    self.fd_step,
                    self.clearance / 4.0
                ),
            });
        }
        if !(self.ode_tol > 0.0 && self.ode_tol < 1.0) {
            return Err(Error::Parameter {
                name: "ode_tol",
                reason: format!("{} is not in (0, 1)", self.ode_tol),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapAnalysis {
    /// Spectrum searched: slice singular values, extended past the slice
    /// column count by the ambient tail when the slice is regular.
    pub spectrum: Vec<f64>,
    pub estimated_real_rank: usize,
    pub real_rank_even: bool,
    pub estimated_rank: usize,
    /// `sigma_r / sigma_{r+1}` at the estimated real rank `r`, when `sigma_{r+1}` exists.
    pub gap_ratio: Option<f64>,
}

/// Real rank `r` maximizing `sigma_r / sigma_{r+1}` over `r <= max_rank` with
/// `sigma_r / sigma_1 > GAP_FLOOR`.
pub fn gap_analysis(spectrum: &[f64], max_rank: usize) -> GapAnalysis {
    let s1 = spectrum.first().copied().unwrap_or(0.0);
    let mut best: Option<(usize, f64)> = None;
    if s1 > 0.0 {
        for r in 1..=max_rank.min(spectrum.len()) {
            if spectrum[r - 1] / s1 <= GAP_FLOOR {
                break;
            }
            if r < spectrum.len() {
                let ratio = spectrum[r - 1] / spectrum[r].max(f64::MIN_POSITIVE);
                if best.is_none_or(|(_, b)| ratio > b) {
                    best = Some((r, ratio));
                }
            } else if best.is_none() {
                best = Some((r, f64::NAN));
            }
        }
    }
    let (r, ratio) = best.unwrap_or((0, f64::NAN));
    GapAnalysis {
        spectrum: spectrum.to_vec(),
        estimated_real_rank: r,
        real_rank_even: r % 2 == 0,
        estimated_rank: r / 2,
        gap_ratio: if ratio.is_finite() { Some(ratio) } else { None },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockNorms {
    pub branch_points: f64,
    pub coefficients: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImmersionReport {
    pub center: DifferentialSystem,
    pub coordinates: SystCoordinates,
    pub loops: LoopSystem,
    pub options: ImmersionOptions,
    pub words: Vec<String>,
    pub free_parameters: usize,
    pub dim_character_variety: usize,
    pub center_monodromy: MonodromyRepresentation,
    /// Largest residuals over the center and every perturbed run.
    pub worst_relation_residual: f64,
    pub worst_det_residual: f64,
    pub criterion_verdict: CriterionVerdict,
    pub irreducibility: IrreducibilityVerdict,
    pub dyad: DyadVerdict,
    pub slice_regular: bool,
    /// Rows: real and imaginary part of each trace; columns: real and
    /// imaginary direction of each slice parameter (ambient when the slice is singular).
    pub jacobian: FloatMatrix,
    pub singular_values: Vec<f64>,
    pub ambient_singular_values: Vec<f64>,
    pub gap: GapAnalysis,
    pub estimated_rank: usize,
    pub gap_ratio: Option<f64>,
    /// `sigma_{2 dim Xi + 1} / sigma_1` of the ambient Jacobian, if it exists.
    pub excess_ratio: Option<f64>,
    pub column_norms: Vec<f64>,
    pub block_norms: BlockNorms,
    pub fd_steps_used: Vec<f64>,
    /// Genus above 2: outside the range where a rank prediction is made.
    pub exploratory: bool,
    /// Criterion fails or the probe finds an invariant line: no rank claim is made.
    pub out_of_hypothesis: bool,
    pub notes: Vec<String>,
}

struct Center {
    system: DifferentialSystem,
    coords: SystCoordinates,
    loops: LoopSystem,
    rep: MonodromyRepresentation,
    meshes: Vec<Mesh>,
    criterion: CriterionVerdict,
    probe: IrreducibilityVerdict,
    dyad: DyadVerdict,
    slice_regular: bool,
}

fn prepare_center(system: &DifferentialSystem, opts: &ImmersionOptions) -> Result<Center> {
    opts.validate()?;
    let curve = system.curve();
    let h = curve
        .as_hyperelliptic()
        .ok_or_else(|| Error::Unsupported("a hyperelliptic curve for the immersion experiment".into()))?;
    let loops = build_loops(h, opts.clearance)?;
    let coords = SystCoordinates::from_system(system)?;
    let sys = NumericSystem::from_exact(system)?;
    let mopts = MonodromyOptions::with_tol(opts.ode_tol);
    let (rep, meshes) = monodromy_numeric(&sys, &loops, &mopts, None)?;
    if !rep.valid {
        return Err(Error::InvalidRepresentation(format!(
            "center monodromy: relation residual {:.3e} (rounding floor {:.3e})",
            rep.relation_residual, rep.rounding_floor
        )));
    }
    Ok(Center {
        criterion: criterion_injective(curve, system)?,
        probe: irreducibility_probe(&rep),
        dyad: dyad_detect(system),
        slice_regular: slice_regular(system),
        system: system.clone(),
        coords,
        loops,
        rep,
        meshes,
    })
}

struct Differences {
    ambient: FloatMatrix,
    worst_relation_residual: f64,
    worst_det_residual: f64,
}

fn ambient_jacobian(center: &Center, words: &[Word], opts: &ImmersionOptions) -> Result<Differences> {
    let base = center.coords.ambient();
    let n_params = base.len();
    let n_words = words.len();
    let mopts = MonodromyOptions::with_tol(opts.ode_tol);
    let h = opts.fd_step;
    let columns: Vec<(Vec<f64>, f64, f64)> = (0..2 * n_params)
        .into_par_iter()
        .map(|col| {
            let (k, imaginary) = (col / 2, col % 2 == 1);
            let unit = if imaginary {
                Complex64::new(0.0, h)
            } else {
                Complex64::new(h, 0.0)
            };
            let label = center.coords.direction_label(k, imaginary);
            let eval = |sign: f64| -> Result<(Vec<Complex64>, [f64; 2])> {
                let mut p = base.clone();
                p[k] += unit * sign;
                let sys = center.coords.system_at(&p)?;
                let d = center.loops.min_distance(sys.branch_points());
                if d < 0.75 * center.loops.clearance * (1.0 - 1e-9) {
                    return Err(Error::InfeasibleClearance(format!(
                        "perturbed branch point within {d:.3e} of a frozen loop"
                    )));
                }
                let (rep, _) = monodromy_numeric(&sys, &center.loops, &mopts, Some(&center.meshes))?;
                let det = rep.det_residuals.iter().cloned().fold(0.0, f64::max);
                Ok((trace_values(&rep.matrices, words), [rep.relation_residual, det]))
            };
            let wrap = |e: Error| Error::Direction {
                direction: label.clone(),
                source: Box::new(e),
            };
            let (plus, [r1, d1]) = eval(1.0).map_err(wrap)?;
            let (minus, [r2, d2]) = eval(-1.0).map_err(wrap)?;
            let column = (0..n_words)
                .flat_map(|w| {
                    let d = (plus[w] - minus[w]) / (2.0 * h);
                    [d.re, d.im]
                })
                .collect();
            Ok((column, r1.max(r2), d1.max(d2)))
        })
        .collect::<Result<_>>()?;
    let worst = columns.iter().map(|c| c.1).fold(center.rep.relation_residual, f64::max);
    let worst_det = columns
        .iter()
        .map(|c| c.2)
        .chain(center.rep.det_residuals.iter().cloned())
        .fold(0.0, f64::max);
    let ambient = FloatMatrix::from_fn(2 * n_words, 2 * n_params, |r, c| Complex64::new(columns[c].0[r], 0.0))?;
    Ok(Differences {
        ambient,
        worst_relation_residual: worst,
        worst_det_residual: worst_det,
    })
}

/// Finite-difference Jacobian of the trace coordinates and its rank at `center`.
pub fn immersion_experiment(
    center: &DifferentialSystem,
    words: Option<&[Word]>,
    opts: &ImmersionOptions,
) -> Result<ImmersionReport> {
    let prepared = prepare_center(center, opts)?;
    experiment_at(&prepared, words, opts)
}

fn experiment_at(c: &Center, words: Option<&[Word]>, opts: &ImmersionOptions) -> Result<ImmersionReport> {
    let g = c.coords.genus();
    let default_words = word_list(g);
    let words = words.unwrap_or(&default_words);
    let diffs = ambient_jacobian(c, words, opts)?;
    let ambient_sv = diffs.ambient.singular_values()?;
    let slice_idx = c.coords.slice_indices();
    let real_cols: Vec<usize> = slice_idx.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
    let dims = dimension_report(g, &LieAlgebraData::sl2())?;
    let mut notes = Vec::new();
    let (jacobian, singular_values, gap) = if c.slice_regular {
        let slice = diffs.ambient.select_columns(&real_cols);
        let sv = slice.singular_values()?;
        let mut spectrum = sv.clone();
        spectrum.extend(ambient_sv.iter().skip(sv.len()));
        let gap = gap_analysis(&spectrum, sv.len());
        (slice, sv, gap)
    } else {
        notes.push("gauge slice is singular at the center; rank read from the ambient Jacobian".into());
        let gap = gap_analysis(&ambient_sv, ambient_sv.len());
        (diffs.ambient.clone(), ambient_sv.clone(), gap)
    };
    let column_norms: Vec<f64> = (0..diffs.ambient.cols())
        .map(|j| diffs.ambient.column_norm(j))
        .collect();
    let m = c.coords.moving_branch_points.len();
    let block = |range: std::ops::Range<usize>| column_norms[range].iter().map(|v| v * v).sum::<f64>().sqrt();
    let block_norms = BlockNorms {
        branch_points: block(0..2 * m),
        coefficients: block(2 * m..column_norms.len()),
    };
    let excess_index = 2 * dims.dim_character_variety;
    let excess_ratio = match (ambient_sv.first(), ambient_sv.get(excess_index)) {
        (Some(&s1), Some(&s)) if s1 > 0.0 => Some(s / s1),
        _ => None,
    };
    let exploratory = g > 2;
    if exploratory {
        notes.push(format!("EXPLORATORY: genus {g} hyperelliptic, no rank prediction"));
    }
    let out_of_hypothesis = !c.criterion.holds() || !c.probe.passes();
    if out_of_hypothesis {
        notes.push("out of hypothesis: criterion fails or an invariant line was found; rank is data only".into());
    }
    if !gap.real_rank_even {
        notes.push(format!("estimated real rank {} is odd", gap.estimated_real_rank));
    }
    Ok(ImmersionReport {
        center: c.system.clone(),
        coordinates: c.coords.clone(),
        loops: c.loops.clone(),
        options: *opts,
        words: words.iter().map(Word::label).collect(),
        free_parameters: c.coords.free_count(),
        dim_character_variety: dims.dim_character_variety,
        center_monodromy: c.rep.clone(),
        worst_relation_residual: diffs.worst_relation_residual,
        worst_det_residual: diffs.worst_det_residual,
        criterion_verdict: c.criterion.clone(),
        irreducibility: c.probe.clone(),
        dyad: c.dyad.clone(),
        slice_regular: c.slice_regular,
        jacobian,
        singular_values,
        ambient_singular_values: ambient_sv,
        estimated_rank: gap.estimated_rank,
        gap_ratio: gap.gap_ratio,
        gap,
        excess_ratio,
        column_norms,
        block_norms,
        fd_steps_used: vec![opts.fd_step],
        exploratory,
        out_of_hypothesis,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub steps: Vec<f64>,
    /// Estimated complex rank per step.
    pub ranks: Vec<usize>,
    pub gap_ratios: Vec<Option<f64>>,
    pub rank_stable: bool,
    /// Largest relative deviation between any two steps over the leading
    /// `min rank` real singular values.
    pub max_singular_value_deviation: f64,
    pub reports: Vec<ImmersionReport>,
}

/// Repeats the experiment for each finite-difference step.
pub fn fd_step_ladder(center: &DifferentialSystem, steps: &[f64], opts: &ImmersionOptions) -> Result<LadderReport> {
    if steps.len() < 3 {
        return Err(Error::Parameter {
            name: "fd_steps",
            reason: format!("a ladder needs at least 3 steps, got {}", steps.len()),
        });
    }
    let lo = steps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = steps.iter().cloned().fold(0.0, f64::max);
    if !(lo > 0.0 && hi / lo >= 100.0 * (1.0 - 1e-12)) {
        return Err(Error::Parameter {
            name: "fd_steps",
            reason: "steps must be positive and span at least two orders of magnitude".into(),
        });
    }
    for &s in steps {
        ImmersionOptions { fd_step: s, ..*opts }.validate()?;
    }
    let prepared = prepare_center(center, &ImmersionOptions { fd_step: lo, ..*opts })?;
    let reports: Vec<ImmersionReport> = steps
        .iter()
        .map(|&s| experiment_at(&prepared, None, &ImmersionOptions { fd_step: s, ..*opts }))
        .collect::<Result<_>>()?;
    let ranks: Vec<usize> = reports.iter().map(|r| r.estimated_rank).collect();
    let lead = reports.iter().map(|r| r.gap.estimated_real_rank).min().unwrap_or(0);
    let mut dev: f64 = 0.0;
    for a in &reports {
        for b in &reports {
            for k in 0..lead {
                let (x, y) = (a.singular_values[k], b.singular_values[k]);
                dev = dev.max((x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE));
            }
        }
    }
    Ok(LadderReport {
        steps: steps.to_vec(),
        gap_ratios: reports.iter().map(|r| r.gap_ratio).collect(),
        rank_stable: ranks.windows(2).all(|w| w[0] == w[1]),
        ranks,
        max_singular_value_deviation: dev,
        reports,
    })
}

/// Coefficient bound used when sampling centers.
pub const CENTER_COEFFICIENT_BOUND: u32 = 2;

/// Seeded random center on a curve `y^2 = x (x - 1) prod (x - lambda_k)`.
///
/// The moving branch points are distinct integers in `[-9, 15]` at distance
/// at least 3 from each other and from 0 and 1. Systems are redrawn until the
/// coefficient matrix has rank at least 2, the criterion holds (where it can),
/// and the gauge slice is regular.
pub fn sample_center(genus: usize, seed: u64, coefficient_bound: u32) -> Result<DifferentialSystem> {
    if genus < 2 {
        return Err(Error::GenusTooSmall(genus));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<i64> = vec![0, 1];
    while points.len() < 2 * genus + 1 {
        let p = rng.random_range(-9..=15i64);
        if points.iter().all(|&q| (p - q).abs() >= 3) {
            points.push(p);
        }
    }
    let curve = Curve::hyperelliptic(&points)?;
    let sl2 = LieAlgebraData::sl2();
    for attempt in 0..1000u64 {
        let sys = sample_system(&curve, &sl2, rng.random::<u64>() ^ attempt, coefficient_bound);
        if dyad_detect(&sys).rank_of_coefficients < 2 || !slice_regular(&sys) {
            continue;
        }
        if genus == 2 && !criterion_injective(&curve, &sys)?.holds() {
            continue;
        }
        return Ok(sys);
    }
    Err(Error::Parameter {
        name: "seed",
        reason: "no admissible center found in 1000 draws".into(),
    })
}
