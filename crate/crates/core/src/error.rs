use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A table or sieve would exceed its memory budget, or a prime table is
    /// too short for the requested support.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Argument outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    /// The certified tail beyond the truncation radius is larger than the
    /// requested absolute tolerance.
    #[error("truncation tail {tail:.3e} exceeds tolerance {tol:.3e} at T = {t}; raise T")]
    Truncation { tail: f64, tol: f64, t: f64 },

    /// A principal-value integrand whose paired form still diverges at 0.
    #[error("non-removable singularity: {0}")]
    Structure(String),

    /// The small-tau series branch and the direct integrand disagree at the
    /// switch-over radius; indicates a cancellation bug.
    #[error("small-tau branch disagrees with direct form by {gap:.3e} (limit {limit:.3e})")]
    Assembly { gap: f64, limit: f64 },

    /// Poisson expansion truncated too early.
    #[error("m-truncation tail {tail:.3e} exceeds tolerance {tol:.3e}; try m-limit {suggested}")]
    MTruncation { tail: f64, tol: f64, suggested: u64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("tolerance not met: {0}")]
    Tolerance(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) => 2,
            Error::Capacity(_) => 3,
            Error::Tolerance(_) | Error::Truncation { .. } | Error::MTruncation { .. } => 4,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
