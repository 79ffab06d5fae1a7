use thiserror::Error;

/// Errors raised by the numerical engines and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {message} (achieved estimate {estimate:e}, error estimate {error:e})")]
    Quadrature {
        message: String,
        estimate: f64,
        error: f64,
    },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("spectral error: {message} (offending eigenvalue {eigenvalue:e})")]
    Spectral { message: String, eigenvalue: f64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("truncation error: leaked norm {leaked:e} exceeds tolerance {tolerance:e}")]
    Truncation { leaked: f64, tolerance: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status used by the command line runner.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Config(_) | Error::Domain(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
