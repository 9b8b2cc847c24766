use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// The variants map onto the CLI exit codes: configuration problems are
/// recoverable by the user, numerical aborts indicate a run that went bad.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("caustic: Jacobian denominator |{denominator:.3e}| at beam {beam}, t = {time}")]
    Caustic {
        beam: usize,
        time: f64,
        denominator: f64,
    },

    #[error("non-finite propagator value for pair ({k1}, {k2}) at cell ({j1}, {j2})")]
    NonFinite {
        k1: usize,
        k2: usize,
        j1: i64,
        j2: i64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{points} points exceed the pairing enumeration guard of {guard}")]
    TooManyPoints { points: usize, guard: usize },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
