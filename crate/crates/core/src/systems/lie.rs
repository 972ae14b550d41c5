use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ExactMatrix, ExactScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinAlgebra {
    Sl2,
    Gl2,
    Sl3,
}

impl BuiltinAlgebra {
    pub fn data(self) -> LieAlgebraData {
        match self {
            BuiltinAlgebra::Sl2 => LieAlgebraData::sl2(),
            BuiltinAlgebra::Gl2 => LieAlgebraData::gl2(),
            BuiltinAlgebra::Sl3 => LieAlgebraData::sl3(),
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "sl2" => Some(BuiltinAlgebra::Sl2),
            "gl2" => Some(BuiltinAlgebra::Gl2),
            "sl3" => Some(BuiltinAlgebra::Sl3),
            _ => None,
        }
    }
}

/// A reductive Lie algebra given by structure constants in a fixed basis.
///
/// `structure_constants[(i * n + j) * n + k]` is the coefficient of `e_k` in `[e_i, e_j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebraData {
    name: String,
    builtin: Option<BuiltinAlgebra>,
    dimension: usize,
    derived_dimension: usize,
    center_dimension: usize,
    structure_constants: Vec<ExactScalar>,
}

impl LieAlgebraData {
    /// Basis (H, E, F) with [H,E] = 2E, [H,F] = -2F, [E,F] = H.
    pub fn sl2() -> Self {
        let mut data = LieAlgebraData::from_matrices("sl2", &sl2_matrices()).expect("sl2 table");
        data.builtin = Some(BuiltinAlgebra::Sl2);
        data
    }

    /// Basis E11, E12, E21, E22.
    pub fn gl2() -> Self {
        let basis: Vec<ExactMatrix> = (0..4).map(|k| unit_matrix(2, k / 2, k % 2)).collect();
        let mut data = LieAlgebraData::from_matrices("gl2", &basis).expect("gl2 table");
        data.builtin = Some(BuiltinAlgebra::Gl2);
        data
    }

    /// Basis E11 - E22, E22 - E33, then E12, E13, E23, E21, E31, E32.
    pub fn sl3() -> Self {
        let mut basis = Vec::new();
        for d in 0..2 {
            let mut h = unit_matrix(3, d, d);
            h.set(d + 1, d + 1, ExactScalar::from_int(-1));
            basis.push(h);
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2), (1, 0), (2, 0), (2, 1)] {
            basis.push(unit_matrix(3, i, j));
        }
        let mut data = LieAlgebraData::from_matrices("sl3", &basis).expect("sl3 table");
        data.builtin = Some(BuiltinAlgebra::Sl3);
        data
    }

    /// Structure constants of the span of the given square matrices under the commutator.
    pub fn from_matrices(name: &str, basis: &[ExactMatrix]) -> Result<Self> {
        let n = basis.len();
        let size = basis.first().map_or(0, ExactMatrix::rows);
        let flat = |m: &ExactMatrix| m.entries().to_vec();
        let columns: Vec<Vec<ExactScalar>> = basis.iter().map(flat).collect();
        let span = ExactMatrix::from_columns(size * size, &columns)?;
        if span.rank() != n {
            return Err(Error::LieAlgebra("basis matrices are dependent".into()));
        }
        let mut constants = Vec::with_capacity(n * n * n);
        for a in basis {
            for b in basis {
                let ab = a.mul(b)?;
                let ba = b.mul(a)?;
                let bracket: Vec<ExactScalar> = ab.entries().iter().zip(ba.entries()).map(|(x, y)| x - y).collect();
                let coords = span
                    .solve(&bracket)?
                    .ok_or_else(|| Error::LieAlgebra("span not closed under the bracket".into()))?;
                constants.extend(coords);
            }
        }
        LieAlgebraData::from_table(name, n, constants)
    }

    /// Validates antisymmetry, the Jacobi identity, and reductivity (`d + c = n`).
    pub fn from_table(name: &str, dimension: usize, structure_constants: Vec<ExactScalar>) -> Result<Self> {
        let n = dimension;
        if structure_constants.len() != n * n * n {
            return Err(Error::LieAlgebra(format!(
                "expected {} structure constants, got {}",
                n * n * n,
                structure_constants.len()
            )));
        }
        let mut data = LieAlgebraData {
            name: name.to_string(),
            builtin: None,
            dimension: n,
            derived_dimension: 0,
            center_dimension: 0,
            structure_constants,
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if data.c(i, j, k) != &-data.c(j, i, k) {
                        return Err(Error::LieAlgebra(format!("antisymmetry fails at ({i},{j},{k})")));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let sum = add3(
                        &data.bracket_of(&data.bracket_basis(i, j), k),
                        &data.bracket_of(&data.bracket_basis(j, k), i),
                        &data.bracket_of(&data.bracket_basis(k, i), j),
                    );
                    if sum.iter().any(|v| !v.is_zero()) {
                        return Err(Error::LieAlgebra(format!("Jacobi identity fails on ({i},{j},{k})")));
                    }
                }
            }
        }
        // [g,g] is spanned by the brackets of basis pairs.
        let brackets: Vec<Vec<ExactScalar>> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| data.bracket_basis(i, j))
            .collect();
        let derived = if n == 0 {
            0
        } else {
            ExactMatrix::from_rows(&brackets)?.rank()
        };
        // center = kernel of x -> ([x, e_j])_j
        let ad = ExactMatrix::from_fn(n * n, n, |row, i| data.c(i, row / n, row % n).clone());
        let center = n - ad.rank();
        if derived + center != n {
            return Err(Error::LieAlgebra(format!(
                "not reductive: dim [g,g] = {derived}, dim center = {center}, dim g = {n}"
            )));
        }
        data.derived_dimension = derived;
        data.center_dimension = center;
        Ok(data)
    }

    fn c(&self, i: usize, j: usize, k: usize) -> &ExactScalar {
        let n = self.dimension;
        &self.structure_constants[(i * n + j) * n + k]
    }

    fn bracket_basis(&self, i: usize, j: usize) -> Vec<ExactScalar> {
        (0..self.dimension).map(|k| self.c(i, j, k).clone()).collect()
    }

    /// [v, e_j] for a coordinate vector v.
    fn bracket_of(&self, v: &[ExactScalar], j: usize) -> Vec<ExactScalar> {
        let n = self.dimension;
        (0..n).map(|k| (0..n).map(|i| &v[i] * self.c(i, j, k)).sum()).collect()
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket(&self, x: &[ExactScalar], y: &[ExactScalar]) -> Vec<ExactScalar> {
        let n = self.dimension;
        let mut out = vec![ExactScalar::zero(); n];
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            for (k, v) in self.bracket_of(x, j).into_iter().enumerate() {
                out[k] += &(&v * yj);
            }
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn builtin(&self) -> Option<BuiltinAlgebra> {
        self.builtin
    }

    pub fn is_sl2(&self) -> bool {
        self.builtin == Some(BuiltinAlgebra::Sl2)
    }

    /// dim g
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// d = dim [g, g]
    pub fn derived_dimension(&self) -> usize {
        self.derived_dimension
    }

    /// c = dim of the center
    pub fn center_dimension(&self) -> usize {
        self.center_dimension
    }

    pub fn structure_constants(&self) -> &[ExactScalar] {
        &self.structure_constants
    }
}

/// H, E, F as 2x2 matrices.
pub fn sl2_matrices() -> [ExactMatrix; 3] {
    let h = ExactMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => ExactScalar::one(),
        (1, 1) => ExactScalar::from_int(-1),
        _ => ExactScalar::zero(),
    });
    [h, unit_matrix(2, 0, 1), unit_matrix(2, 1, 0)]
}

fn unit_matrix(n: usize, r: usize, c: usize) -> ExactMatrix {
    ExactMatrix::from_fn(n, n, |i, j| {
        if (i, j) == (r, c) {
            ExactScalar::one()
        } else {
            ExactScalar::zero()
        }
    })
}

fn add3(a: &[ExactScalar], b: &[ExactScalar], c: &[ExactScalar]) -> Vec<ExactScalar> {
    a.iter().zip(b).zip(c).map(|((x, y), z)| x + y + z).collect()
}

/// JSON: a built-in name (`"sl2"`, `"gl2"`, `"sl3"`) or a custom table.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub(crate) enum AlgebraJson {
    Builtin(BuiltinAlgebra),
    Table {
        name: String,
        dimension: usize,
        structure_constants: Vec<Vec<Vec<ExactScalar>>>,
    },
}

impl TryFrom<AlgebraJson> for LieAlgebraData {
    type Error = Error;
    fn try_from(j: AlgebraJson) -> Result<Self> {
        match j {
            AlgebraJson::Builtin(b) => Ok(b.data()),
            AlgebraJson::Table {
                name,
                dimension,
                structure_constants,
            } => {
                let flat: Vec<ExactScalar> = structure_constants.into_iter().flatten().flatten().collect();
                LieAlgebraData::from_table(&name, dimension, flat)
            }
        }
    }
}

impl From<&LieAlgebraData> for AlgebraJson {
    fn from(l: &LieAlgebraData) -> Self {
        match l.builtin {
            Some(b) => AlgebraJson::Builtin(b),
            None => {
                let n = l.dimension;
                AlgebraJson::Table {
                    name: l.name.clone(),
                    dimension: n,
                    structure_constants: (0..n)
                        .map(|i| (0..n).map(|j| l.bracket_basis(i, j)).collect())
                        .collect(),
                }
            }
        }
    }
}

impl Serialize for LieAlgebraData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AlgebraJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for LieAlgebraData {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = AlgebraJson::deserialize(d)?;
        LieAlgebraData::try_from(raw).map_err(serde::de::Error::custom)
    }
}
