//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The requested truncation cannot hold the state or operator to the
    /// configured tail tolerance.
    #[error("insufficient cutoff: need at least {required}, got {got}")]
    InsufficientCutoff { required: usize, got: usize },

    /// A circuit element pushed photon population past a mode cutoff.
    #[error("headroom violation: {lost:.3e} of the squared norm fell past a mode cutoff (tolerance {tol:.1e})")]
    Headroom { lost: f64, tol: f64 },

    /// An operation that requires a normalized state received one that is
    /// not normalized within tolerance.
    #[error("state not normalized: squared norm is {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    /// Two states with incompatible shapes were combined.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A conditional measurement outcome has probability below the underflow
    /// threshold; the post-measurement state would be numerically meaningless.
    #[error("improbable outcome: probability {probability:.3e} is below {threshold:.1e}")]
    ImprobableOutcome { probability: f64, threshold: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
