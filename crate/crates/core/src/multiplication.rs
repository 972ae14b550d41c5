//! Multiplication of holomorphic 1-forms into quadratic differentials.
//!
//! `theta_matrix` restricts the map `H^0(K) (x) W -> H^0(K^2)` to a subspace
//! `W`. Columns are indexed by pairs (canonical basis element `i`, generator
//! `j` of `W`) at position `i * dim W + j`; rows are coordinates in the
//! quadratic basis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::{canonical_basis, quadratic_basis, Curve, Differential, DifferentialBasis};
use crate::error::{Error, Result};
use crate::field::{ExactMatrix, ExactScalar};
use crate::systems::DifferentialSystem;

/// Range of the integer coordinates drawn for random subspaces.
pub const SAMPLE_COORD_BOUND: i64 = 10;

/// A subspace of `H^0(K)` given by independent generators in canonical-basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubspaceSelection {
    #[serde(skip)]
    ambient: DifferentialBasis,
    generators: Vec<Vec<ExactScalar>>,
}

impl SubspaceSelection {
    pub fn new(curve: &Curve, generators: Vec<Vec<ExactScalar>>) -> Result<Self> {
        let ambient = canonical_basis(curve);
        let g = ambient.len();
        if generators.len() > g {
            return Err(Error::SubspaceTooLarge {
                w_dim: generators.len(),
                genus: g,
            });
        }
        for v in &generators {
            if v.len() != g {
                return Err(Error::LengthMismatch {
                    expected: g,
                    got: v.len(),
                });
            }
        }
        if !generators.is_empty() {
            let rank = ExactMatrix::from_rows(&generators)?.rank();
            if rank != generators.len() {
                return Err(Error::DependentGenerators {
                    rank,
                    count: generators.len(),
                });
            }
        }
        Ok(SubspaceSelection { ambient, generators })
    }

    /// All of `H^0(K)`, generated by the canonical basis.
    pub fn full(curve: &Curve) -> Self {
        let g = curve.genus();
        let generators = (0..g)
            .map(|i| (0..g).map(|k| ExactScalar::from_int((i == k) as i64)).collect())
            .collect();
        SubspaceSelection {
            ambient: canonical_basis(curve),
            generators,
        }
    }

    pub fn ambient(&self) -> &DifferentialBasis {
        &self.ambient
    }

    pub fn generators(&self) -> &[Vec<ExactScalar>] {
        &self.generators
    }

    pub fn dimension(&self) -> usize {
        self.generators.len()
    }

    /// The `j`-th generator as a differential.
    pub fn generator_differential(&self, j: usize) -> Result<Differential> {
        Differential::combination(&self.generators[j], &self.ambient.elements)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// `H^0(K) (x) H^0(K)`
    Full,
    /// `H^0(K) (x) W`
    Subspace { dimension: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicationMatrix {
    pub curve: Curve,
    pub domain: Domain,
    #[serde(serialize_with = "serialize_rows")]
    pub matrix: ExactMatrix,
    pub rank: usize,
}

fn serialize_rows<S: serde::Serializer>(m: &ExactMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<ExactScalar>> = (0..m.rows()).map(|i| m.row(i)).collect();
    rows.serialize(s)
}

/// Coordinates of `omega_i * omega_k` in the quadratic basis, for all canonical basis pairs.
#[derive(Clone, Debug)]
pub struct ProductTable {
    curve: Curve,
    target_dimension: usize,
    entries: Vec<Vec<Vec<ExactScalar>>>,
}

impl ProductTable {
    pub fn new(curve: &Curve) -> Result<Self> {
        let omega = canonical_basis(curve);
        let quad = quadratic_basis(curve);
        let mut entries = Vec::with_capacity(omega.len());
        for a in &omega.elements {
            let mut row = Vec::with_capacity(omega.len());
            for b in &omega.elements {
                let p = a.product(b)?;
                row.push(quad.express(&p.numerator, p.class)?);
            }
            entries.push(row);
        }
        Ok(ProductTable {
            curve: curve.clone(),
            target_dimension: quad.len(),
            entries,
        })
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn genus(&self) -> usize {
        self.entries.len()
    }

    /// `3g - 3`
    pub fn target_dimension(&self) -> usize {
        self.target_dimension
    }

    /// Coordinates of `omega_i * omega_k`.
    pub fn product(&self, i: usize, k: usize) -> &[ExactScalar] {
        &self.entries[i][k]
    }

    /// Matrix of the map restricted to `H^0(K) (x) span(generators)`.
    pub fn restricted(&self, generators: &[Vec<ExactScalar>]) -> ExactMatrix {
        let g = self.genus();
        let w = generators.len();
        let mut m = ExactMatrix::zeros(self.target_dimension, g * w);
        for i in 0..g {
            for (j, gen) in generators.iter().enumerate() {
                for r in 0..self.target_dimension {
                    let v: ExactScalar = gen
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(k, c)| c * &self.entries[i][k][r])
                        .sum();
                    m.set(r, i * w + j, v);
                }
            }
        }
        m
    }
}

pub fn theta_matrix(curve: &Curve, w: &SubspaceSelection) -> Result<MultiplicationMatrix> {
    if w.ambient().curve != *curve {
        return Err(Error::SystemMismatch("subspace belongs to a different curve".into()));
    }
    let table = ProductTable::new(curve)?;
    let matrix = table.restricted(w.generators());
    let rank = matrix.rank();
    let domain = if w.dimension() == curve.genus() && *w == SubspaceSelection::full(curve) {
        Domain::Full
    } else {
        Domain::Subspace {
            dimension: w.dimension(),
        }
    };
    Ok(MultiplicationMatrix {
        curve: curve.clone(),
        domain,
        matrix,
        rank,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surjectivity {
    Surjective,
    NotSurjective,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoetherVerdict {
    pub verdict: Surjectivity,
    pub rank: usize,
    pub corank: usize,
    pub target_dimension: usize,
}

impl NoetherVerdict {
    pub fn is_surjective(&self) -> bool {
        self.verdict == Surjectivity::Surjective
    }
}

fn surjectivity(rank: usize, target: usize) -> Surjectivity {
    if rank == target {
        Surjectivity::Surjective
    } else {
        Surjectivity::NotSurjective
    }
}

/// Surjectivity of `H^0(K) (x) H^0(K) -> H^0(K^2)`.
pub fn noether_check(curve: &Curve) -> Result<NoetherVerdict> {
    let m = theta_matrix(curve, &SubspaceSelection::full(curve))?;
    let target = m.matrix.rows();
    Ok(NoetherVerdict {
        verdict: surjectivity(m.rank, target),
        rank: m.rank,
        corank: target - m.rank,
        target_dimension: target,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanFailure {
    pub trial: usize,
    pub rank: usize,
    pub generators: Vec<Vec<ExactScalar>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub curve: Curve,
    pub trials: usize,
    pub w_dim: usize,
    pub seed: u64,
    pub successes: usize,
    pub target_dimension: usize,
    /// Rank of the restricted map in each trial, by trial index.
    pub ranks: Vec<usize>,
    pub failures: Vec<ScanFailure>,
}

/// Random `w_dim`-dimensional subspace for one trial; coordinates are
/// integers in `[-10, 10]`, redrawn until independent.
pub fn sample_subspace(curve: &Curve, w_dim: usize, seed: u64, trial: usize) -> Result<SubspaceSelection> {
    let g = curve.genus();
    if w_dim > g {
        return Err(Error::SubspaceTooLarge { w_dim, genus: g });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    loop {
        let gens: Vec<Vec<ExactScalar>> = (0..w_dim)
            .map(|_| {
                (0..g)
                    .map(|_| ExactScalar::from_int(rng.random_range(-SAMPLE_COORD_BOUND..=SAMPLE_COORD_BOUND)))
                    .collect()
            })
            .collect();
        match SubspaceSelection::new(curve, gens) {
            Ok(w) => return Ok(w),
            Err(Error::DependentGenerators { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Draws `trials` random subspaces of dimension `w_dim` and records which give a surjective map.
///
/// Trial `t` uses stream `t` of a generator seeded by `seed`, so results do
/// not depend on scheduling.
pub fn lazarsfeld_scan(curve: &Curve, trials: usize, w_dim: usize, seed: u64) -> Result<ScanReport> {
    if trials == 0 {
        return Err(Error::ZeroCount("trials"));
    }
    if w_dim == 0 {
        return Err(Error::ZeroCount("w_dim"));
    }
    if w_dim > curve.genus() {
        return Err(Error::SubspaceTooLarge {
            w_dim,
            genus: curve.genus(),
        });
    }
    let table = ProductTable::new(curve)?;
    let target = table.target_dimension();
    let results: Vec<(usize, SubspaceSelection)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let w = sample_subspace(curve, w_dim, seed, t)?;
            Ok((table.restricted(w.generators()).rank(), w))
        })
        .collect::<Result<_>>()?;
    let ranks: Vec<usize> = results.iter().map(|(r, _)| *r).collect();
    let failures = results
        .into_iter()
        .enumerate()
        .filter(|(_, (r, _))| *r < target)
        .map(|(trial, (rank, w))| ScanFailure {
            trial,
            rank,
            generators: w.generators,
        })
        .collect::<Vec<_>>();
    Ok(ScanReport {
        curve: curve.clone(),
        trials,
        w_dim,
        seed,
        successes: trials - failures.len(),
        target_dimension: target,
        ranks,
        failures,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionOutcome {
    Holds,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub verdict: CriterionOutcome,
    /// Dimension of the span `V` of the differentials occurring in the system.
    pub v_dimension: usize,
    pub theta_v_rank: usize,
    pub target_dimension: usize,
}

impl CriterionVerdict {
    pub fn holds(&self) -> bool {
        self.verdict == CriterionOutcome::Holds
    }
}

/// Injectivity test for the differential of the monodromy map at a system.
///
/// With `V` the span of the differentials occurring in `system`, the map on
/// first cohomology is injective iff its dual is surjective, and the dual is
/// `H^0(K) (x) V -> H^0(K^2)`. The verdict holds iff that map has full rank `3g - 3`.
pub fn criterion_injective(curve: &Curve, system: &DifferentialSystem) -> Result<CriterionVerdict> {
    if system.curve() != curve {
        return Err(Error::SystemMismatch(format!(
            "system is defined on {}, not {}",
            system.curve().label(),
            curve.label()
        )));
    }
    let table = ProductTable::new(curve)?;
    let target = table.target_dimension();
    let v = system.omega_span();
    let rank = if v.is_empty() { 0 } else { table.restricted(&v).rank() };
    Ok(CriterionVerdict {
        verdict: if !v.is_empty() && rank == target {
            CriterionOutcome::Holds
        } else {
            CriterionOutcome::Fails
        },
        v_dimension: v.len(),
        theta_v_rank: rank,
        target_dimension: target,
    })
}
