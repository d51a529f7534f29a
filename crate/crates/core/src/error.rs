//! Error type shared across the crate.
//!
//! Errors split into two coarse kinds mirroring the CLI exit codes: usage
//! errors (bad arguments, violated preconditions) and numerical errors
//! (non-convergence, degenerate data discovered mid-computation).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("point lies outside the open unit ball: |x| = {norm} (guard {guard})")]
    OutsideBall { norm: f64, guard: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("no usable scales for regression: {0}")]
    NoUsableScales(String),

    #[error("minimization did not converge after {evals} objective evaluations (best objective {best})")]
    NoConvergence { evals: usize, best: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by the caller (exit code 2); false for
    /// numerical failures discovered mid-computation (exit code 3).
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
