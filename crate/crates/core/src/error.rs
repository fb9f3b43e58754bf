use thiserror::Error;

/// Errors raised by channel analysis, sweeps and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unsupported region: {0}")]
    UnsupportedRegion(String),

    #[error("channel has no stationary state: lambda_{axis} = 1 with t_{axis} = {t}")]
    NoStationaryState { axis: usize, t: f64 },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for the CLI: 3 for internal-consistency failures,
    /// 2 for everything data-related.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InternalConsistency(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
