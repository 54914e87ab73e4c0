use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("angle {value} is outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{what} did not converge (best residual {residual:e})")]
    NoConvergence { what: String, residual: f64 },

    #[error("{0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
