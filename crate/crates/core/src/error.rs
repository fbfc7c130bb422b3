use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A closed-form admissibility condition failed. Carries the violated
    /// inequality as structured data so callers can report it precisely.
    #[error("configuration: {constraint} violated (lhs {lhs}, rhs {rhs})")]
    Config {
        constraint: String,
        lhs: f64,
        rhs: f64,
    },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// An internal invariant that should hold by construction failed.
    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(constraint: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Error::Config {
            constraint: constraint.into(),
            lhs,
            rhs,
        }
    }
}
