//! Explicit curve models and exact bases of holomorphic differentials.
//!
//! Two models are supported: hyperelliptic curves `y^2 = f(x)` given by the
//! roots of `f`, and smooth plane quartics (canonically embedded genus 3).
//! Basis ordering is fixed: ascending monomial degree, and for quadratic
//! differentials on hyperelliptic curves the `y^2` class precedes the `y` class.

mod basis;
mod model;
mod poly;

pub use basis::{
    canonical_basis, express_in_basis, quadratic_basis, DenominatorClass, Differential, DifferentialBasis,
    QUARTIC_QUADRATIC_MONOMIALS,
};
pub use model::{quartic_monomials, Curve, HyperellipticCurve, PlaneQuartic, QuarticFamily};
pub use poly::{Monomial, Poly};
