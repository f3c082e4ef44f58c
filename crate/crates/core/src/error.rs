use thiserror::Error;

/// Errors raised by operator construction and the bound evaluators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("tensor dims {dims:?} do not multiply to matrix side {side}")]
    DimsProduct { dims: Vec<usize>, side: usize },

    #[error("operator is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("operator is not positive definite (min eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),

    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),

    #[error("test eigenvalue {0:.3e} outside [0, 1]")]
    NotATest(f64),

    #[error("factor index {index} out of range for {factors} tensor factors")]
    IndexOutOfRange { index: usize, factors: usize },

    #[error("spectral function undefined at eigenvalue {0:.3e}")]
    UndefinedSpectralFn(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension budget exceeded: total dimension {total} > {budget}")]
    BudgetExceeded { total: usize, budget: usize },

    #[error("enumeration budget exceeded: {outcomes} outcomes > {budget}")]
    EnumerationBudget { outcomes: u128, budget: u128 },

    #[error("eigensolver failed to converge")]
    Eigensolver,

    #[error("malformed operator file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
