use thiserror::Error;

/// Crate-wide error type. Variants map one-to-one onto the failure modes of
/// the numerical layers so callers can match on them.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("rank-deficient design: |R[{col},{col}]| = {pivot:.3e} below tolerance {tol:.3e}")]
    RankDeficient { col: usize, pivot: f64, tol: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge within {0} terms")]
    NoConvergence(usize),

    #[error("g-integral diverges for prior exponent {0}")]
    DivergentIntegral(f64),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("model is saturated (r-squared within 1e-12 of 1)")]
    DegenerateModel,

    #[error("marginal not integrable: n = {n} too small for p_gamma = {p_gamma}")]
    Integrability { n: usize, p_gamma: usize },

    #[error("the null model is excluded under this prior")]
    NullModelNotAllowed,

    #[error("every candidate model is degenerate")]
    AllDegenerate,

    #[error("model space too large: p = {0} exceeds the enumeration guard of 25")]
    TooManyModels(usize),

    #[error("optimization failure: {0}")]
    OptimizationFailure(String),

    #[error("residual sum of squares is zero")]
    ZeroResidual,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("simplex iteration limit reached")]
    IterationLimit,

    #[error("tuning failure: {0}")]
    TuningFailure(String),

    #[error("too many replicate failures: {failed} of {total}")]
    ReplicateFailure { failed: usize, total: usize },

    #[error("file not found: {0}")]
    FileNotFound(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    ParseError {
        row: usize,
        column: String,
        message: String,
    },

    #[error("no usable rows after filtering")]
    EmptyAfterFiltering,

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    InvalidConfig(Vec<String>),

    #[error("unknown method name: {0}")]
    UnknownMethod(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
