use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("image-dipole series does not converge for |r| = {0} at steady state")]
    NonConvergent(f64),

    #[error("histogram layout error: {0}")]
    Layout(String),

    #[error("insufficient data for fit: {usable} usable channel(s), need at least 2")]
    InsufficientData { usable: usize },

    #[error("histogram shows no decay (slope {slope:.3e} ± {stderr:.3e} per second)")]
    NonDecay { slope: f64, stderr: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("no coincidences recorded in configuration {0}")]
    ZeroCoincidences(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
