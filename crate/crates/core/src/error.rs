use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The ansatz formula has a 0/0 form at this point.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("grid would hold {requested} points, above the configured maximum of {max}")]
    Capacity { requested: usize, max: usize },

    #[error("linear program is infeasible (phase-1 residual {residual:e})")]
    Infeasible { residual: f64 },

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("simplex hit the iteration limit ({iterations} pivots)")]
    IterationLimit { iterations: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidState(_)
            | Error::InvalidArgument(_)
            | Error::Degenerate(_)
            | Error::Parse(_) => 2,
            Error::Infeasible { .. } | Error::Unbounded | Error::IterationLimit { .. } => 3,
            Error::Capacity { .. } => 4,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
        }
    }
}
