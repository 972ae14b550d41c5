use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("matrix entry at ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("relative tolerance {0} must lie in (0, 1)")]
    BadTolerance(f64),

    #[error("singular value iteration did not converge within {max_iter} iterations")]
    SvdNoConvergence { max_iter: usize },

    #[error("branch points {0} and {1} coincide")]
    CoincidentBranchPoints(usize, usize),

    #[error("a hyperelliptic curve of genus >= 2 needs at least 5 branch points, got {0}")]
    TooFewBranchPoints(usize),

    #[error("quartic is not in a verified family and smoothness was not asserted")]
    SmoothnessNotAsserted,

    #[error("quartic needs 15 coefficients, got {0}")]
    QuarticCoefficientCount(usize),

    #[error("differential is not in the span of the basis (residual {residual})")]
    NotInSpan { residual: String },

    #[error("subspace generators are linearly dependent (rank {rank} of {count})")]
    DependentGenerators { rank: usize, count: usize },

    #[error("subspace dimension {w_dim} exceeds genus {genus}")]
    SubspaceTooLarge { w_dim: usize, genus: usize },

    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),

    #[error("genus {0} is below 2")]
    GenusTooSmall(usize),

    #[error("invalid Lie algebra: {0}")]
    LieAlgebra(String),

    #[error("system does not match the curve: {0}")]
    SystemMismatch(String),

    #[error("vector length {got} does not match expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("operation requires {0}")]
    Unsupported(String),

    #[error("loop geometry infeasible: {0}")]
    InfeasibleClearance(String),

    #[error("integrator step size underflow at x = {x}")]
    StepUnderflow { x: String },

    #[error("integrator produced non-finite values at x = {x}")]
    NonFinite { x: String },

    #[error("square root changed sheet between mesh points near x = {x}")]
    SheetJump { x: String },

    #[error("representation is invalid: {0}")]
    InvalidRepresentation(String),

    #[error("perturbation along direction {direction} failed: {source}")]
    Direction {
        direction: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::SvdNoConvergence { .. }
            | Error::StepUnderflow { .. }
            | Error::NonFinite { .. }
            | Error::SheetJump { .. }
            | Error::InvalidRepresentation(_)
            | Error::NotInSpan { .. } => true,
            Error::Direction { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
