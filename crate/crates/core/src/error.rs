use thiserror::Error;

/// Errors raised by the optics, biphoton and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Fresnel chirp undersampled at the window edge.
    #[error("sampling violation: k*dx*x_max/|z| = {ratio:.4} exceeds pi (dx = {spacing:e} m, x_max = {x_max:e} m, z = {distance:e} m)")]
    SamplingViolation {
        ratio: f64,
        spacing: f64,
        x_max: f64,
        distance: f64,
    },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("invalid band: {0}")]
    InvalidBand(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
