use thiserror::Error;

/// Errors produced by construction and evaluation routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),
    #[error("matrix deviates from Hermitian by {deviation:.3e} (tolerance {tol:.3e})")]
    NotHermitian { deviation: f64, tol: f64 },
    #[error("invalid subsystem layout: {0}")]
    BadLayout(String),
    #[error("subsystem index {index} out of range for {count} subsystems")]
    BadSubsystem { index: usize, count: usize },
    #[error("state norm deviates from 1 by {0:.3e}")]
    BadNorm(f64),
    #[error("invalid density operator: {0}")]
    BadDensity(String),
    #[error("invalid observable: {0}")]
    BadObservable(String),
    #[error("invalid channel: {0}")]
    BadChannel(String),
    #[error("unknown outcome label {0:?}")]
    UnknownLabel(String),
    #[error("scenario invariant violated: {0}")]
    BadScenario(String),
    #[error("probability {0:.3e} is more negative than -1e-12")]
    NegativeProbability(f64),
    #[error("marginal tables are inconsistent: {0}")]
    InconsistentTables(String),
    #[error("simplex iteration cap of {0} exceeded")]
    IterationCap(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
