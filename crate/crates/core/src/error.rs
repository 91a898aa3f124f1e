use thiserror::Error;

/// Errors produced by the solvers in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{solver} did not converge within {iterations} iterations (residual {residual:e})")]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("model decrease {denominator:e} is not positive; the subproblem solver is broken")]
    DegenerateDenominator { denominator: f64 },

    #[error(
        "iteration {iteration}: Cauchy decrease violated ({kind}): decrease {decrease:e} < bound {bound:e}"
    )]
    CauchyDecreaseViolation {
        iteration: usize,
        kind: &'static str,
        decrease: f64,
        bound: f64,
    },

    #[error("iteration {iteration}: objective increased from {previous:e} to {next:e}")]
    NonMonotone {
        iteration: usize,
        previous: f64,
        next: f64,
    },

    #[error("possibly biactive set has {size} indices, above the enumeration cap {cap}")]
    BiactiveSetTooLarge { size: usize, cap: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("oracle failure: {0}")]
    OracleFailure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("matrix market: {0}")]
    MatrixMarket(String),
}

pub type Result<T> = std::result::Result<T, Error>;
