//! Exact arithmetic over the Gaussian rationals Q(i) and complex floating
//! point, with rank computation in both regimes.
//!
//! Exact ranks use fraction-free elimination and carry no tolerance. Numeric
//! ranks count singular values above a relative threshold.

mod float;
mod matrix;
mod scalar;

pub(crate) use float::complex_pairs;
pub use float::{numeric_rank, FloatMatrix, NumericRank, DEFAULT_REL_TOL, SVD_MAX_ITER};
pub use matrix::ExactMatrix;
pub use scalar::ExactScalar;

/// Rank of `m` over Q(i).
pub fn exact_rank(m: &ExactMatrix) -> usize {
    m.rank()
}
