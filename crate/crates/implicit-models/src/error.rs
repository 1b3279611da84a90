use thiserror::Error;

/// Errors produced by model construction, sampling and training.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate distribution: no finite weight")]
    DegenerateDistribution,

    #[error("improper distribution: {0}")]
    ImproperDistribution(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("lemma preconditions violated: B*A has non-positive entries")]
    LemmaPreconditions,

    #[error("power iteration did not converge in {max_iter} iterations (residual {residual:.3e})")]
    NoConvergence { max_iter: usize, residual: f64 },

    #[error("no eigenvalue within {tol:.1e} of 1 (residual {residual:.3e})")]
    NoUnitEigenvalue { tol: f64, residual: f64 },

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("training diverged at epoch {epoch}: {detail}")]
    Diverged { epoch: usize, detail: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
