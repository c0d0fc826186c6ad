use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-stationary system: drift matrix has an eigenvalue with real part {min_real:.3e}")]
    NonStationary { min_real: f64 },

    #[error("singular linear system in {0}")]
    Singular(&'static str),

    #[error("mean spin vanishes; squeezing criterion undefined")]
    VanishingSpin,

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
