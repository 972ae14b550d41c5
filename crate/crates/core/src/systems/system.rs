use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lie::{sl2_matrices, LieAlgebraData};
use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::field::{ExactMatrix, ExactScalar};

/// A differential system `delta = sum_j e_j (x) (sum_i coeff[j][i] omega_i)`.
///
/// Row `j` of `coefficients` is the differential paired with the Lie algebra
/// basis element `e_j`, in coordinates of the canonical basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialSystem {
    curve: Curve,
    lie: LieAlgebraData,
    coefficients: ExactMatrix,
}

impl DifferentialSystem {
    pub fn new(curve: Curve, lie: LieAlgebraData, coefficients: ExactMatrix) -> Result<Self> {
        let expected = (lie.dimension(), curve.genus());
        let got = (coefficients.rows(), coefficients.cols());
        if expected != got {
            return Err(Error::Shape {
                expected: format!("{}x{} (dim g x genus)", expected.0, expected.1),
                got: format!("{}x{}", got.0, got.1),
            });
        }
        Ok(DifferentialSystem {
            curve,
            lie,
            coefficients,
        })
    }

    pub fn from_integers(curve: Curve, lie: LieAlgebraData, rows: &[Vec<i64>]) -> Result<Self> {
        let rows: Vec<Vec<ExactScalar>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| ExactScalar::from_int(v)).collect())
            .collect();
        let m = ExactMatrix::from_rows(&rows)?;
        DifferentialSystem::new(curve, lie, m)
    }

    /// The dyad `B (x) omega`: `b` in Lie algebra coordinates, `omega` in canonical-basis coordinates.
    pub fn dyad(curve: Curve, lie: LieAlgebraData, b: &[ExactScalar], omega: &[ExactScalar]) -> Result<Self> {
        if b.len() != lie.dimension() {
            return Err(Error::LengthMismatch {
                expected: lie.dimension(),
                got: b.len(),
            });
        }
        if omega.len() != curve.genus() {
            return Err(Error::LengthMismatch {
                expected: curve.genus(),
                got: omega.len(),
            });
        }
        let m = ExactMatrix::from_fn(b.len(), omega.len(), |j, i| &b[j] * &omega[i]);
        DifferentialSystem::new(curve, lie, m)
    }

    pub fn zero(curve: Curve, lie: LieAlgebraData) -> Self {
        let m = ExactMatrix::zeros(lie.dimension(), curve.genus());
        DifferentialSystem {
            curve,
            lie,
            coefficients: m,
        }
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn lie(&self) -> &LieAlgebraData {
        &self.lie
    }

    pub fn coefficients(&self) -> &ExactMatrix {
        &self.coefficients
    }

    /// Same algebra and curve, new coefficients.
    pub fn with_coefficients(&self, coefficients: ExactMatrix) -> Result<Self> {
        DifferentialSystem::new(self.curve.clone(), self.lie.clone(), coefficients)
    }

    /// Same coefficients on another curve of the same genus.
    pub fn with_curve(&self, curve: Curve) -> Result<Self> {
        DifferentialSystem::new(curve, self.lie.clone(), self.coefficients.clone())
    }

    /// Constant gauge change by `s` (2x2, invertible): every coefficient
    /// matrix `B_i` becomes `s B_i s^-1`. Only for the built-in sl2 basis (H, E, F).
    pub fn conjugated_sl2(&self, s: &ExactMatrix) -> Result<Self> {
        if !self.lie.is_sl2() {
            return Err(Error::Unsupported("the sl2 algebra for conjugation".into()));
        }
        if (s.rows(), s.cols()) != (2, 2) {
            return Err(Error::Shape {
                expected: "2x2".into(),
                got: format!("{}x{}", s.rows(), s.cols()),
            });
        }
        let det = s.get(0, 0) * s.get(1, 1) - s.get(0, 1) * s.get(1, 0);
        let inv_det = det.inv().ok_or_else(|| Error::Parameter {
            name: "conjugator",
            reason: "singular".into(),
        })?;
        let inv = ExactMatrix::from_fn(2, 2, |i, j| {
            let v = match (i, j) {
                (0, 0) => s.get(1, 1).clone(),
                (1, 1) => s.get(0, 0).clone(),
                (0, 1) => -s.get(0, 1).clone(),
                _ => -s.get(1, 0).clone(),
            };
            &v * &inv_det
        });
        let basis = sl2_matrices();
        let mut out = ExactMatrix::zeros(3, self.coefficients.cols());
        for i in 0..self.coefficients.cols() {
            let mut b = ExactMatrix::zeros(2, 2);
            for (j, e) in basis.iter().enumerate() {
                let c = self.coefficients.get(j, i);
                b = ExactMatrix::from_fn(2, 2, |r, q| b.get(r, q) + &(c * e.get(r, q)));
            }
            let conj = s.mul(&b)?.mul(&inv)?;
            out.set(0, i, conj.get(0, 0).clone());
            out.set(1, i, conj.get(0, 1).clone());
            out.set(2, i, conj.get(1, 0).clone());
        }
        self.with_coefficients(out)
    }

    /// Basis of the span of the differentials appearing in the system.
    pub fn omega_span(&self) -> Vec<Vec<ExactScalar>> {
        self.coefficients.row_space_basis()
    }
}

/// `sum_j functional_j * row_j`: the differential obtained by pairing the
/// system with a linear functional on the Lie algebra.
pub fn contract(system: &DifferentialSystem, functional: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
    let m = system.coefficients();
    if functional.len() != m.rows() {
        return Err(Error::LengthMismatch {
            expected: m.rows(),
            got: functional.len(),
        });
    }
    Ok((0..m.cols())
        .map(|i| functional.iter().enumerate().map(|(j, h)| h * m.get(j, i)).sum())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadVerdict {
    pub is_dyad: bool,
    pub rank_of_coefficients: usize,
}

/// A system is a dyad `B (x) omega` (or zero) iff its coefficient matrix has rank at most 1.
pub fn dyad_detect(system: &DifferentialSystem) -> DyadVerdict {
    let rank = system.coefficients().rank();
    DyadVerdict {
        is_dyad: rank <= 1,
        rank_of_coefficients: rank,
    }
}

/// Integer coefficients uniform in `[-bound, bound]`, deterministic in `seed`.
pub fn sample_system(curve: &Curve, lie: &LieAlgebraData, seed: u64, coefficient_bound: u32) -> DifferentialSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = coefficient_bound as i64;
    let m = ExactMatrix::from_fn(lie.dimension(), curve.genus(), |_, _| {
        ExactScalar::from_int(rng.random_range(-b..=b))
    });
    DifferentialSystem {
        curve: curve.clone(),
        lie: lie.clone(),
        coefficients: m,
    }
}

/// JSON: `{"curve": ..., "algebra": ..., "coefficients": [[...], ...]}` with one row per Lie algebra basis element.
#[derive(Serialize, Deserialize)]
struct SystemJson {
    curve: Curve,
    algebra: LieAlgebraData,
    coefficients: Vec<Vec<ExactScalar>>,
}

impl Serialize for DifferentialSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SystemJson {
            curve: self.curve.clone(),
            algebra: self.lie.clone(),
            coefficients: (0..self.coefficients.rows())
                .map(|j| self.coefficients.row(j))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DifferentialSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SystemJson::deserialize(d)?;
        let build = || {
            let m = if raw.coefficients.is_empty() {
                ExactMatrix::zeros(0, raw.curve.genus())
            } else {
                ExactMatrix::from_rows(&raw.coefficients)?
            };
            DifferentialSystem::new(raw.curve, raw.algebra, m)
        };
        build().map_err(serde::de::Error::custom)
    }
}
