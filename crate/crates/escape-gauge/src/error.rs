use thiserror::Error;

/// Errors shared across the crate. Numerical routines prefer returning these
/// over silently producing NaN/inf.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An input lies outside the domain a routine is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// The evaluation point is too close to a pole for the result to carry
    /// any accuracy; the distance and the detection threshold are reported.
    #[error("pole proximity: |z - u_{{{k},{l}}}| = {dist:.3e} < {tol:.3e}")]
    PoleProximity { k: u64, l: u64, dist: f64, tol: f64 },

    /// The truncated series cannot answer the question asked: either the
    /// point lies outside the region where the tail bound is valid, or the
    /// tail could flip a comparison.
    #[error("truncation unsafe: {0}")]
    TruncationUnsafe(String),

    /// An iterative solver failed to reach its tolerance.
    #[error("no convergence after {steps} steps (residual {residual:.3e})")]
    NoConvergence { steps: u32, residual: f64 },

    /// Not enough data to perform a fit or estimate.
    #[error("insufficient range: {0}")]
    InsufficientRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
