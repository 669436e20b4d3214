use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The instance data breaks a structural invariant (bad dimensions, empty
    /// feasible set, cost out of range, ...).
    #[error("invalid instance: {0}")]
    InstanceInvalid(String),

    /// A schedule assigns a nurse a pattern outside its feasible set, or has
    /// the wrong length.
    #[error("invalid schedule: {0}")]
    ScheduleInvalid(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    /// Malformed instance or results document. `line` and `column` are 1-based.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
