use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method failed or a result came out non-finite.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A spectrum set has no levels for the requested spin.
    #[error("no spectrum stored for spin J={0}")]
    MissingSpin(u32),

    /// A grid point cannot be evaluated (underflow, window outside grid, ...).
    #[error("grid error: {0}")]
    Grid(String),

    /// Invalid or unknown configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
