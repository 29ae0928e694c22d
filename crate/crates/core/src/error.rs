use thiserror::Error;

/// Errors produced by the numerical kernels and the verifier.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,
    #[error("non-finite sample")]
    NonFiniteSample,
    #[error("atom count mismatch: {0} vs {1}")]
    AtomCountMismatch(usize, usize),
    #[error("W1 not finite under configured truncation")]
    W1NotFinite,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("infinite Hardy constant")]
    InfiniteHardyConstant,
    #[error("zero isoperimetric constant")]
    ZeroIsoperimetricConstant,
    #[error("oracle size exceeded: n = {0} (at most 4 supported)")]
    OracleSizeExceeded(usize),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("eigensolver failed to converge")]
    NoConvergence,
    #[error("entry law not normalizable: {0}")]
    NotNormalizable(String),
    #[error("non-finite moment: {0}")]
    NonFiniteMoment(String),
    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),
    #[error("unknown bound id `{0}`")]
    UnknownBound(String),
    #[error("{bound} needs the scenario constant {symbol}")]
    MissingConstant { bound: String, symbol: String },
    #[error("{0} requires a log-Sobolev constant; the scenario only provides a Poincare constant")]
    RequiresLsi(String),
    #[error("{bound} is not applicable: {reason}")]
    NotApplicable { bound: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
