//! Monodromy of sl2 systems on odd-degree hyperelliptic curves.
//!
//! Loops are polylines in the x-plane; the square root `y` is continued
//! along them by nearest-root tracking, and the linear system
//! `dY = (sum_i b_i x^i dx / y) Y` is integrated with an adaptive
//! Dormand-Prince 5(4) pair.

mod loops;
mod ode;
mod rep;

pub use loops::{
    build_loops, build_loops_for_points, default_base_point, track_sheets, Loop, LoopSystem, CIRCLE_VERTICES,
};
pub use ode::{nearest_root, transport_along, IntegratorOptions, Mat2, Mesh, NumericSystem, PathTransport};
pub use rep::{
    integrate_loop, irreducibility_probe, monodromy, monodromy_numeric, operator_norm, relation_residual, trace_values,
    trace_vector, word_list, Irreducibility, IrreducibilityVerdict, MonodromyOptions, MonodromyRepresentation,
    TraceVector, Word, PROBE_TOL,
};
