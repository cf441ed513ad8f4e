use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("matrix is not Hermitian (max |A - A^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("state vector has norm {0}, expected 1")]
    NotNormalized(f64),

    #[error("channel is not trace preserving (residual {0:e})")]
    NotTracePreserving(f64),

    #[error("channel is not completely positive (min Choi eigenvalue {0:e})")]
    NotCompletelyPositive(f64),

    #[error("Kraus operators disagree with the superoperator (residual {0:e})")]
    KrausMismatch(f64),

    #[error("map is not idempotent (residual {0:e})")]
    NotIdempotent(f64),

    #[error("map is not self-adjoint (residual {0:e})")]
    NotSelfAdjoint(f64),

    #[error("group element {index} is not unitary (residual {residual:e})")]
    NotUnitary { index: usize, residual: f64 },

    #[error("group does not contain the identity")]
    MissingIdentity,

    #[error("group is not closed: product of elements {left} and {right} is not in the group")]
    GroupNotClosed { left: usize, right: usize },

    #[error("POVM is invalid: {0}")]
    InvalidPovm(String),

    #[error("support of the first argument is not contained in the support of the second")]
    SupportViolation,

    #[error("{name} must lie in {range}, got {value}")]
    ParameterOutOfRange {
        name: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("bisection bracket failure: {0}")]
    BracketFailure(String),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("function is undefined on retained eigenvalue {0}")]
    FunctionUndefined(f64),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn out_of_range(name: &'static str, range: &'static str, value: f64) -> Self {
        Error::ParameterOutOfRange { name, range, value }
    }

    /// True for failures caused by malformed input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_) | Error::Json(_) | Error::Io(_) | Error::DimensionMismatch { .. }
        )
    }
}
