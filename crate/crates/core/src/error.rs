use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("arity error: {0}")]
    Arity(String),

    #[error("oracle scope exceeded: {0}")]
    OracleScope(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical consistency failure: {0}")]
    Numerical(String),

    #[error("empty sample")]
    EmptySample,

    #[error("invalid config: {0}")]
    Config(String),

    #[error("job failed on sample {index}: {source}")]
    Job {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 3,
            Error::Job { source, .. } => source.exit_code(),
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
