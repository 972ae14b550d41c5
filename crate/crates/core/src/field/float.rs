use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative threshold for [`numeric_rank`].
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Iteration budget handed to the SVD.
pub const SVD_MAX_ITER: usize = 10_000;

/// Dense row-major complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloatMatrix {
    rows: usize,
    cols: usize,
    #[serde(with = "complex_pairs")]
    entries: Vec<Complex64>,
}

impl FloatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape {
                expected: format!("{} entries for {rows}x{cols}", rows * cols),
                got: format!("{} entries", entries.len()),
            });
        }
        if let Some(k) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFiniteEntry {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(FloatMatrix { rows, cols, entries })
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        FloatMatrix::new(rows, cols, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        FloatMatrix::new(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Euclidean norm of column `j`.
    pub fn column_norm(&self, j: usize) -> f64 {
        (0..self.rows).map(|i| self.get(i, j).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Sub-matrix made of the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> FloatMatrix {
        FloatMatrix {
            rows: self.rows,
            cols: cols.len(),
            entries: (0..self.rows)
                .flat_map(|i| cols.iter().map(move |&j| (i, j)))
                .map(|(i, j)| self.get(i, j))
                .collect(),
        }
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        if self.rows == 0 || self.cols == 0 {
            return Ok(Vec::new());
        }
        let svd = self
            .to_nalgebra()
            .try_svd(false, false, f64::EPSILON, SVD_MAX_ITER)
            .ok_or(Error::SvdNoConvergence { max_iter: SVD_MAX_ITER })?;
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        Ok(sv)
    }
}

/// Result of [`numeric_rank`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericRank {
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// Counts singular values above `rel_tol * sigma_max`.
pub fn numeric_rank(m: &FloatMatrix, rel_tol: f64) -> Result<NumericRank> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::BadTolerance(rel_tol));
    }
    let singular_values = m.singular_values()?;
    let rank = match singular_values.first() {
        Some(&smax) if smax > 0.0 => singular_values.iter().filter(|&&s| s > rel_tol * smax).count(),
        _ => 0,
    };
    Ok(NumericRank { rank, singular_values })
}

pub(crate) mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}
