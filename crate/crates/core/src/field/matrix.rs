use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::scalar::ExactScalar;
use super::FloatMatrix;
use crate::error::{Error, Result};

/// Dense row-major matrix over Q(i).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ExactScalar>,
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ExactScalar>,
}

impl TryFrom<RawMatrix> for ExactMatrix {
    type Error = Error;
    fn try_from(raw: RawMatrix) -> Result<Self> {
        ExactMatrix::new(raw.rows, raw.cols, raw.entries)
    }
}

impl From<ExactMatrix> for RawMatrix {
    fn from(m: ExactMatrix) -> Self {
        RawMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries,
        }
    }
}

impl ExactMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<ExactScalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape {
                expected: format!("{} entries for {rows}x{cols}", rows * cols),
                got: format!("{} entries", entries.len()),
            });
        }
        Ok(ExactMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            entries: vec![ExactScalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        ExactMatrix::from_fn(n, n, |i, j| {
            if i == j {
                ExactScalar::one()
            } else {
                ExactScalar::zero()
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ExactScalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ExactMatrix { rows, cols, entries }
    }

    pub fn from_rows(rows: &[Vec<ExactScalar>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Shape {
                expected: format!("rows of length {cols}"),
                got: format!("row of length {}", bad.len()),
            });
        }
        Ok(ExactMatrix {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().cloned().collect(),
        })
    }

    /// Builds a matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<ExactScalar>]) -> Result<Self> {
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::Shape {
                expected: format!("columns of length {rows}"),
                got: format!("column of length {}", bad.len()),
            });
        }
        Ok(ExactMatrix::from_fn(rows, columns.len(), |i, j| columns[j][i].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[ExactScalar] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactScalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ExactScalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<ExactScalar> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<ExactScalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        ExactMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape {
                expected: format!("{} rows on the right factor", self.cols),
                got: format!("{}", rhs.rows),
            });
        }
        Ok(ExactMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * rhs.get(k, j)).sum()
        }))
    }

    pub fn mul_vec(&self, v: &[ExactScalar]) -> Result<Vec<ExactScalar>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|k| self.get(i, k) * &v[k]).sum())
            .collect())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ExactScalar::is_zero)
    }

    pub fn to_float(&self) -> FloatMatrix {
        FloatMatrix::new(
            self.rows,
            self.cols,
            self.entries.iter().map(ExactScalar::to_complex).collect(),
        )
        .expect("exact matrix entries convert to finite floats")
    }

    /// Rank over Q(i) by fraction-free (Bareiss) elimination on a Gaussian
    /// integer image of the matrix.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let mut a = self.gaussian_integer_rows();
        bareiss_rank(&mut a, self.cols)
    }

    /// Each row scaled by the lcm of its denominators, so all entries are
    /// Gaussian integers. Row scaling by nonzero integers preserves rank.
    fn gaussian_integer_rows(&self) -> Vec<Vec<GaussInt>> {
        (0..self.rows)
            .map(|i| {
                let row = &self.entries[i * self.cols..(i + 1) * self.cols];
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, z| acc.lcm(z.re.denom()).lcm(z.im.denom()));
                row.iter()
                    .map(|z| GaussInt {
                        re: (&z.re * &lcm).to_integer(),
                        im: (&z.im * &lcm).to_integer(),
                    })
                    .collect()
            })
            .collect()
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (ExactMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&factor * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Nonzero rows of the reduced row echelon form: a canonical basis of the row space.
    pub fn row_space_basis(&self) -> Vec<Vec<ExactScalar>> {
        let (r, pivots) = self.rref();
        (0..pivots.len()).map(|i| r.row(i)).collect()
    }

    /// One solution of `self * x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[ExactScalar]) -> Result<Option<Vec<ExactScalar>>> {
        if b.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                got: b.len(),
            });
        }
        let aug = ExactMatrix::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![ExactScalar::zero(); self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = r.get(i, self.cols).clone();
        }
        Ok(Some(x))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn sub(&self, o: &GaussInt) -> GaussInt {
        GaussInt {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    /// Division known to be exact in Z[i].
    fn div_exact(&self, d: &GaussInt) -> GaussInt {
        let n = &d.re * &d.re + &d.im * &d.im;
        let re = &self.re * &d.re + &self.im * &d.im;
        let im = &self.im * &d.re - &self.re * &d.im;
        debug_assert!((&re % &n).is_zero() && (&im % &n).is_zero(), "inexact Bareiss division");
        GaussInt {
            re: re / &n,
            im: im / n,
        }
    }
}

/// Bareiss elimination with column skipping. After each pivot step every
/// remaining entry is a minor of the input, so the division by the previous
/// pivot is exact.
fn bareiss_rank(a: &mut [Vec<GaussInt>], cols: usize) -> usize {
    let rows = a.len();
    let mut prev = GaussInt {
        re: BigInt::one(),
        im: BigInt::zero(),
    };
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            for j in c + 1..cols {
                let v = pivot_row[c].mul(&row[j]).sub(&row[c].mul(&pivot_row[j]));
                row[j] = v.div_exact(&prev);
            }
            row[c] = GaussInt {
                re: BigInt::zero(),
                im: BigInt::zero(),
            };
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}
