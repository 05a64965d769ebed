use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point was supplied outside the region where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid Blaschke product: {0}")]
    InvalidBlaschke(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A denominator that is positive in exact arithmetic came out as zero or negative.
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("no termination within {limit} iterations: {context}")]
    NonTermination { limit: usize, context: String },

    #[error("range error: {0}")]
    Range(String),

    #[error("rejected: {0}")]
    Rejected(String),

    #[error("configuration invalid:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
