//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the geometric and numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a domain restriction (e.g. a non-positive length).
    #[error("domain error: {0}")]
    Domain(String),

    /// A polar angle falls outside the reachable branch of a conic.
    #[error("branch error: {0}")]
    Branch(String),

    /// An arclength or coordinate lies outside the sampled range.
    #[error("range error: {0}")]
    Range(String),

    /// A bracketed root was requested but the function keeps one sign.
    #[error("no root: {0}")]
    NoRoot(String),

    /// A profile integration reached the rotation axis (x -> 0).
    #[error("axis collision at s = {s}: x = {x}")]
    AxisCollision { s: f64, x: f64 },

    /// The adaptive integrator failed to take an acceptable step.
    #[error("integration step failure at s = {s}: {reason}")]
    StepFailure { s: f64, reason: String },

    /// Sampled data does not match the expected grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A linear system is singular (e.g. the homogeneous problem has kernel).
    #[error("singular system: {0}")]
    SingularSystem(String),

    /// A certificate-level check failed.
    #[error("certificate failure: {0}")]
    CertificateFailure(String),

    /// A Killing rotation axis is parallel to the surface's symmetry axis.
    #[error("axis alignment error: {0}")]
    AxisAlignment(String),

    /// A boundary chart does not cover the requested data.
    #[error("chart coverage error: {0}")]
    ChartCoverage(String),

    /// An I/O failure, annotated with the offending path.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
