use thiserror::Error;

/// Failures reported by the numerical routines.
///
/// The CLI maps these onto process exit codes; see [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),
    /// Matrix dimension and zero-mode count disagree in parity.
    #[error("parity error: {0}")]
    Parity(String),
    /// Shapes of the inputs do not fit together.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// Input exceeds a supported size.
    #[error("size limit: {0}")]
    SizeLimit(String),
    /// An iterative method or adaptive rule failed to meet its tolerance.
    #[error("no convergence: {what} (best estimate {estimate:e}, error estimate {error:e})")]
    Convergence {
        what: String,
        estimate: f64,
        error: f64,
    },
    /// Result not representable in double precision.
    #[error("range error: {0}")]
    Range(String),
    /// Too few significant digits survive at these parameters.
    #[error("ill-conditioned: {0}")]
    Conditioning(String),
    /// Filesystem or formatting failure.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn convergence(what: impl Into<String>, estimate: f64, error: f64) -> Self {
        Error::Convergence {
            what: what.into(),
            estimate,
            error,
        }
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Convergence { .. } | Error::Conditioning(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
