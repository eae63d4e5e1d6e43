use thiserror::Error;

/// Errors raised by the integrators, models and the benchmark harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain violation at step {step}: {message}")]
    Domain { step: usize, message: String },

    #[error("blow-up detected at step {step} (t = {t})")]
    BlowUp { step: usize, t: f64 },

    #[error("adaptive step fell below h_min = {h_min} at step {step}")]
    StepTooSmall { step: usize, h_min: f64 },

    #[error("maximum number of steps ({0}) exceeded")]
    MaxStepsExceeded(usize),

    #[error("quadrature rule `{0}` is not symmetric")]
    AsymmetricRule(String),

    #[error("unknown quadrature rule `{0}`")]
    UnknownRule(String),

    #[error("power iteration did not converge after {iters} iterations (last Rayleigh quotient {last})")]
    NoConvergence { iters: usize, last: f64 },

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("state is not at a coarse node (m = {0})")]
    NotCoarseNode(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Attach a step index to a domain violation reported by a potential.
    pub(crate) fn domain(step: usize, message: impl Into<String>) -> Self {
        Error::Domain {
            step,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
