use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("column {column} has zero variance and cannot be standardized")]
    DegenerateColumn { column: usize },

    /// The solver hit its sweep budget. `coefficients` holds the best iterate.
    #[error("solver did not converge after {iterations} sweeps (violation {violation:.3e})")]
    NotConverged {
        iterations: usize,
        violation: f64,
        coefficients: Vec<f64>,
    },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("invalid folds: {0}")]
    InvalidFolds(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit status for the CLI: 2 for configuration problems, 3 for
    /// bad data, 4 for solver non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotConverged { .. } => 4,
            Error::Data(_) | Error::DegenerateColumn { .. } => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
