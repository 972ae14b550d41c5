use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::loops::{Loop, LoopSystem};
use super::ode::{transport_along, IntegratorOptions, Mat2, Mesh, NumericSystem};
use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::systems::DifferentialSystem;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyOptions {
    pub ode_tol: f64,
    /// Largest accepted `|det - 1|`.
    pub det_tol: f64,
    /// Largest accepted surface-relation residual.
    pub relation_tol: f64,
}

impl Default for MonodromyOptions {
    fn default() -> Self {
        MonodromyOptions {
            ode_tol: 1e-12,
            det_tol: 1e-10,
            relation_tol: 1e-8,
        }
    }
}

impl MonodromyOptions {
    pub fn with_tol(ode_tol: f64) -> Self {
        MonodromyOptions {
            ode_tol,
            ..Default::default()
        }
    }

    fn integrator(&self) -> IntegratorOptions {
        IntegratorOptions::with_tol(self.ode_tol)
    }
}

/// Transport matrices along `a_1, b_1, ..., a_g, b_g`.
///
/// Transport reverses products: following path `p` then path `q` gives
/// `T(q) T(p)`. The residual is therefore taken on
/// `B_g^-1 A_g^-1 B_g A_g ... B_1^-1 A_1^-1 B_1 A_1`, the image of `prod [a_i, b_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyRepresentation {
    #[serde(with = "matrix_list")]
    pub matrices: Vec<Mat2>,
    pub det_residuals: Vec<f64>,
    pub relation_residual: f64,
    /// Largest operator norm among the generators.
    pub max_generator_norm: f64,
    /// `eps * max_generator_norm^4`: the size of residual that rounding alone
    /// produces when the relation is evaluated in double precision.
    pub rounding_floor: f64,
    pub valid: bool,
    /// Accepted integrator steps per loop.
    pub steps: Vec<usize>,
}

pub(crate) mod matrix_list {
    use super::Mat2;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    /// Each matrix as four `[re, im]` pairs in row-major order.
    pub fn serialize<S: Serializer>(v: &[Mat2], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|m| [(0, 0), (0, 1), (1, 0), (1, 1)].map(|ij| [m[ij].re, m[ij].im]))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Mat2>, D::Error> {
        let raw = Vec::<[[f64; 2]; 4]>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|q| {
                let z = q.map(|[re, im]| Complex64::new(re, im));
                Mat2::new(z[0], z[1], z[2], z[3])
            })
            .collect())
    }
}

/// Largest singular value of a 2x2 matrix.
pub fn operator_norm(m: &Mat2) -> f64 {
    let fro2 = m.norm_squared();
    let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).norm();
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0);
    ((fro2 + disc.sqrt()) / 2.0).sqrt()
}

fn det(m: &Mat2) -> Complex64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Inverse of a unimodular-ish 2x2 matrix via the adjugate.
fn inverse(m: &Mat2) -> Mat2 {
    Mat2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det(m)
}

/// `|| B_g^-1 A_g^-1 B_g A_g ... B_1^-1 A_1^-1 B_1 A_1 - I ||_2`
pub fn relation_residual(matrices: &[Mat2]) -> f64 {
    let mut p = Mat2::identity();
    for pair in matrices.chunks(2) {
        let (a, b) = (&pair[0], &pair[1]);
        p = inverse(b) * inverse(a) * b * a * p;
    }
    operator_norm(&(p - Mat2::identity()))
}

impl MonodromyRepresentation {
    pub fn from_matrices(matrices: Vec<Mat2>, opts: &MonodromyOptions) -> Self {
        let det_residuals: Vec<f64> = matrices.iter().map(|m| (det(m) - 1.0).norm()).collect();
        let relation_residual = relation_residual(&matrices);
        let max_generator_norm = matrices.iter().map(operator_norm).fold(0.0, f64::max);
        let valid = det_residuals.iter().all(|&d| d <= opts.det_tol) && relation_residual <= opts.relation_tol;
        MonodromyRepresentation {
            steps: vec![0; matrices.len()],
            matrices,
            det_residuals,
            relation_residual,
            max_generator_norm,
            rounding_floor: f64::EPSILON * max_generator_norm.powi(4),
            valid,
        }
    }

    pub fn genus(&self) -> usize {
        self.matrices.len() / 2
    }
}

/// Transport of `system` along one loop.
pub fn integrate_loop(curve: &Curve, system: &DifferentialSystem, lp: &Loop, ode_tol: f64) -> Result<Mat2> {
    check_curve(curve, system)?;
    let sys = NumericSystem::from_exact(system)?;
    let start = lp.sheets[0];
    Ok(transport_along(&sys, &lp.vertices, start, &IntegratorOptions::with_tol(ode_tol), None)?.transport)
}

fn check_curve(curve: &Curve, system: &DifferentialSystem) -> Result<()> {
    if system.curve() != curve {
        return Err(Error::SystemMismatch("system lives on a different curve".into()));
    }
    Ok(())
}

pub fn monodromy(
    curve: &Curve,
    system: &DifferentialSystem,
    loops: &LoopSystem,
    ode_tol: f64,
) -> Result<MonodromyRepresentation> {
    check_curve(curve, system)?;
    let sys = NumericSystem::from_exact(system)?;
    Ok(monodromy_numeric(&sys, loops, &MonodromyOptions::with_tol(ode_tol), None)?.0)
}

/// Monodromy of a float system, also returning the integration meshes.
///
/// With `replay`, each loop reuses its recorded mesh instead of adapting.
/// The starting sheet at the base point is the root nearest `loops.base_sheet`.
pub fn monodromy_numeric(
    sys: &NumericSystem,
    loops: &LoopSystem,
    opts: &MonodromyOptions,
    replay: Option<&[Mesh]>,
) -> Result<(MonodromyRepresentation, Vec<Mesh>)> {
    if loops.loops.len() != 2 * sys.genus() {
        return Err(Error::LengthMismatch {
            expected: 2 * sys.genus(),
            got: loops.loops.len(),
        });
    }
    if let Some(r) = replay {
        if r.len() != loops.loops.len() {
            return Err(Error::LengthMismatch {
                expected: loops.loops.len(),
                got: r.len(),
            });
        }
    }
    let integ = opts.integrator();
    let results: Vec<_> = loops
        .loops
        .par_iter()
        .enumerate()
        .map(|(k, lp)| transport_along(sys, &lp.vertices, loops.base_sheet, &integ, replay.map(|r| &r[k])))
        .collect::<Result<_>>()?;
    let mut rep = MonodromyRepresentation::from_matrices(results.iter().map(|r| r.transport).collect(), opts);
    rep.steps = results.iter().map(|r| r.mesh.steps()).collect();
    Ok((rep, results.into_iter().map(|r| r.mesh).collect()))
}

/// A word in `a_1, b_1, ..., a_g, b_g`; letter `2(i-1)` is `a_i`, `2(i-1)+1` is `b_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn label(&self) -> String {
        self.0
            .iter()
            .map(|&l| format!("{}{}", if l % 2 == 0 { 'a' } else { 'b' }, l / 2 + 1))
            .collect()
    }

    /// Transport of the concatenated path: matrices multiply in reverse order.
    pub fn evaluate(&self, matrices: &[Mat2]) -> Mat2 {
        self.0.iter().fold(Mat2::identity(), |acc, &l| matrices[l] * acc)
    }
}

/// Single generators, then `a_i b_i`, then `a_1 b_1 a_2`, then the remaining
/// products `x_k x_l` (`k < l`) of two distinct generators.
pub fn word_list(genus: usize) -> Vec<Word> {
    let n = 2 * genus;
    let mut words: Vec<Word> = (0..n).map(|k| Word(vec![k])).collect();
    words.extend((0..genus).map(|i| Word(vec![2 * i, 2 * i + 1])));
    if genus >= 2 {
        words.push(Word(vec![0, 1, 2]));
    }
    for k in 0..n {
        for l in k + 1..n {
            let w = Word(vec![k, l]);
            if !words.contains(&w) {
                words.push(w);
            }
        }
    }
    words
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceVector {
    pub words: Vec<String>,
    #[serde(with = "crate::field::complex_pairs")]
    pub values: Vec<Complex64>,
}

pub fn trace_values(matrices: &[Mat2], words: &[Word]) -> Vec<Complex64> {
    words.iter().map(|w| w.evaluate(matrices).trace()).collect()
}

pub fn trace_vector(rep: &MonodromyRepresentation) -> Result<TraceVector> {
    if !rep.valid {
        return Err(Error::InvalidRepresentation(format!(
            "relation residual {:.3e}, worst det residual {:.3e}",
            rep.relation_residual,
            rep.det_residuals.iter().cloned().fold(0.0, f64::max)
        )));
    }
    let words = word_list(rep.genus());
    Ok(TraceVector {
        words: words.iter().map(Word::label).collect(),
        values: trace_values(&rep.matrices, &words),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Irreducibility {
    ProbablyIrreducible,
    CommonEigenvectorFound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrreducibilityVerdict {
    pub verdict: Irreducibility,
    #[serde(with = "crate::field::complex_pairs")]
    pub witness: Vec<Complex64>,
}

impl IrreducibilityVerdict {
    pub fn passes(&self) -> bool {
        self.verdict == Irreducibility::ProbablyIrreducible
    }
}

/// Relative tolerance for eigenvector matching in the probe.
pub const PROBE_TOL: f64 = 1e-7;

fn eigenvectors(m: &Mat2) -> Vec<[Complex64; 2]> {
    let tr = m.trace();
    let disc = (tr * tr - 4.0 * det(m)).sqrt();
    let mut out = Vec::new();
    for lambda in [(tr + disc) / 2.0, (tr - disc) / 2.0] {
        let n = m - Mat2::identity() * lambda;
        let r0 = [n[(0, 0)], n[(0, 1)]];
        let r1 = [n[(1, 0)], n[(1, 1)]];
        let norm = |r: &[Complex64; 2]| (r[0].norm_sqr() + r[1].norm_sqr()).sqrt();
        let r = if norm(&r0) >= norm(&r1) { r0 } else { r1 };
        let len = norm(&r);
        if len == 0.0 {
            continue;
        }
        out.push([-r[1] / len, r[0] / len]);
    }
    out
}

fn is_eigenvector(m: &Mat2, v: &[Complex64; 2]) -> bool {
    let mv = [m[(0, 0)] * v[0] + m[(0, 1)] * v[1], m[(1, 0)] * v[0] + m[(1, 1)] * v[1]];
    let lambda = v[0].conj() * mv[0] + v[1].conj() * mv[1];
    let res = ((mv[0] - lambda * v[0]).norm_sqr() + (mv[1] - lambda * v[1]).norm_sqr()).sqrt();
    res <= PROBE_TOL * operator_norm(m).max(1.0)
}

fn is_scalar(m: &Mat2) -> bool {
    let scale = operator_norm(m).max(1.0);
    (m[(0, 0)] - m[(1, 1)]).norm() <= PROBE_TOL * scale
        && m[(0, 1)].norm() <= PROBE_TOL * scale
        && m[(1, 0)].norm() <= PROBE_TOL * scale
}

/// Looks for a line fixed by every matrix among the eigenvectors of each one.
pub fn irreducibility_probe(rep: &MonodromyRepresentation) -> IrreducibilityVerdict {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let candidates: Vec<[Complex64; 2]> = rep
        .matrices
        .iter()
        .filter(|m| !is_scalar(m))
        .flat_map(eigenvectors)
        .collect();
    if rep.matrices.iter().all(is_scalar) {
        return IrreducibilityVerdict {
            verdict: Irreducibility::CommonEigenvectorFound,
            witness: vec![one, zero],
        };
    }
    for v in candidates {
        if rep.matrices.iter().all(|m| is_eigenvector(m, &v)) {
            return IrreducibilityVerdict {
                verdict: Irreducibility::CommonEigenvectorFound,
                witness: v.to_vec(),
            };
        }
    }
    IrreducibilityVerdict {
        verdict: Irreducibility::ProbablyIrreducible,
        witness: Vec::new(),
    }
}
