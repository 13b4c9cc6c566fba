use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A matrix failed the density-matrix invariants.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A Pauli triple `(a, b, T)` composes to a matrix with a negative eigenvalue.
    #[error("not a state: minimum eigenvalue {min_eigenvalue:e}")]
    NotAState { min_eigenvalue: f64 },

    /// A quadrature rule was requested with too few circle points.
    #[error("invalid n_circle {0}: classes with a U(1) factor need at least 5 points")]
    InvalidCircleCount(usize),

    /// A quadrature rule was applied to a different subgroup than it was built for.
    #[error("quadrature rule was generated for {rule} but the twirl targets {target}")]
    MismatchedRule { rule: String, target: String },

    /// A decision quantity landed inside the tolerance band `[tol/10, 10 tol]`.
    #[error("ambiguous at tolerance: {check} = {value:e} (tol {tol:e})")]
    AmbiguousAtTolerance { check: String, value: f64, tol: f64 },

    /// Kraus operators do not satisfy `sum K^dag K = 1`.
    #[error("not trace preserving: deviation {0:e}")]
    NotTracePreserving(f64),

    /// A numeric argument is outside its allowed range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Malformed JSON input.
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::MalformedInput(e.to_string())
    }
}
