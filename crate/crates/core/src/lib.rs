//! Exact and numerical tools for differential systems on algebraic curves:
//! multiplication-map ranks over Q(i), monodromy of sl2 systems on
//! hyperelliptic curves, and finite-difference rank of the monodromy map.

pub mod curves;
pub mod error;
pub mod field;
pub mod immersion;
pub mod monodromy;
pub mod multiplication;
pub mod systems;

pub use error::{Error, Result};
