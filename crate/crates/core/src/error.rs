use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Angular power is spread so evenly that the resultant vanishes.
    #[error("angular spread undefined: resultant magnitude {0:e} below 1e-12")]
    UndefinedSpread(f64),

    #[error("numeric error: {0}")]
    Numeric(String),

    /// Mixture parameters cannot be matched to the table moments.
    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A record or header did not match the interchange schema.
    #[error("line {line}: {message}")]
    Schema { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
