//! Lie algebra data, differential systems `delta` in `g (x) H^0(K)`, and the
//! dimension counts of systems and of the character variety.

mod dims;
mod lie;
mod system;

pub use dims::{dimension_report, DimensionReport};
pub use lie::{sl2_matrices, BuiltinAlgebra, LieAlgebraData};
pub use system::{contract, dyad_detect, sample_system, DifferentialSystem, DyadVerdict};
