use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while building ladders, propagating states, or running scenarios.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("operation requires {expected} mode but the ladder is configured for {found}")]
    ModeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("step size {dt} violates the stability rule: dt * coupling radius = {product:.3e} > {limit}")]
    Stability { dt: f64, product: f64, limit: f64 },

    #[error("norm drifted by {drift:.3e} in a single step at t = {time}")]
    NormDrift { time: f64, drift: f64 },

    #[error("adaptive step size underflow at t = {time} (h = {step:.3e})")]
    StepUnderflow { time: f64, step: f64 },

    #[error("no oscillation period: found {crossings} zero crossings, need at least 3")]
    NoPeriod { crossings: usize },

    #[error("eigenvector tracking lost at t = {time}: best successive overlap {overlap:.4} below {threshold}")]
    TrackingLost { time: f64, overlap: f64, threshold: f64 },

    #[error("calibration infeasible: {0}")]
    Infeasible(String),

    #[error("configuration errors:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag used by the CLI error report.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::ModeMismatch { .. } => "mode-mismatch",
            Error::Stability { .. } => "stability",
            Error::NormDrift { .. } => "norm-drift",
            Error::StepUnderflow { .. } => "step-underflow",
            Error::NoPeriod { .. } => "no-period",
            Error::TrackingLost { .. } => "tracking-lost",
            Error::Infeasible(_) => "infeasible",
            Error::Config(_) => "config",
            Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => "file-not-found",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
