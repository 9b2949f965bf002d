use thiserror::Error;

/// Errors raised by the numerical kernels and the model layer.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Validation { name: &'static str, reason: String },

    #[error("{routine} did not converge for a = {a}, x = {x}")]
    NonConvergence { routine: &'static str, a: f64, x: f64 },

    #[error("quadrature on [{a}, {b}] reached error {error:e} (best estimate {estimate})")]
    Accuracy { a: f64, b: f64, estimate: f64, error: f64 },

    #[error("non-finite value of {what} at x = {at}")]
    Domain { what: String, at: f64 },

    #[error("integral over [{a}, {b}] diverges at an endpoint")]
    Divergent { a: f64, b: f64 },

    #[error("panel {index} ending at {end}: {source}")]
    Panel { index: usize, end: f64, source: Box<Error> },

    #[error("cumulative weight vanishes at x = {x}")]
    DegenerateWeight { x: f64 },

    #[error("hazard vanishes identically near x = {x}")]
    DegenerateHazard { x: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("every component survival is zero at x = {x}")]
    SupportExhausted { x: f64 },

    #[error("distribution is defective: {0}")]
    Defective(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// True when this error (or the panel error it wraps) reports a divergent integral.
    pub fn is_divergent(&self) -> bool {
        match self {
            Error::Divergent { .. } => true,
            Error::Panel { source, .. } => source.is_divergent(),
            _ => false,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Validation { name, reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
