use thiserror::Error;

/// Errors raised while solving or conditioning a scaled total least squares problem.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix or vector contains NaN or infinite entries")]
    NonFinite,

    #[error("iteration failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("factorization met a non-positive pivot; matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("problem is not generic: gap {gap:e} <= tolerance {tol:e}")]
    NongenericProblem { gap: f64, tol: f64 },

    #[error("last component of the smallest right singular vector is {0:e}")]
    DegenerateSingularVector(f64),

    #[error("residual norm {norm:e} is below tolerance {tol:e} (consistent system)")]
    ZeroResidual { norm: f64, tol: f64 },

    #[error("solution is zero; relative condition number is undefined")]
    ZeroSolution,

    #[error("matrix is rank deficient: smallest singular value {smallest:e}, largest {largest:e}")]
    RankDeficient { smallest: f64, largest: f64 },

    #[error("sample size {k} exceeds dimension {n}")]
    SampleTooLarge { k: usize, n: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
