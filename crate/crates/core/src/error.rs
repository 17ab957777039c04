use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the solvers in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid medium: {0}")]
    InvalidMedium(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A special function left the representable floating-point range.
    #[error("order {order} at z = {z}: value exceeds floating-point range")]
    Overflow { order: u32, z: Complex64 },

    /// The normalization chain of a downward recurrence underflowed.
    #[error("order {order} at z = {z}: normalization underflow, accuracy lost")]
    Underflow { order: u32, z: Complex64 },

    #[error(
        "series did not converge within {n_used} terms (partial sum {partial_sum:e}, tail estimate {tail_estimate:e})"
    )]
    SeriesNotConverged {
        partial_sum: f64,
        tail_estimate: f64,
        n_used: u32,
    },

    #[error("root search did not converge (best iterate {best}, relative residual {residual:e})")]
    RootNotConverged { best: Complex64, residual: f64 },

    /// Q came out non-positive for the given handedness sign.
    #[error("quality factor sign violation: Q = {q} with beta = {beta}")]
    QualitySign { q: f64, beta: i8 },

    #[error("n_max diverges: {0}")]
    DivergentMaxOrder(String),

    #[error("medium is neither right- nor left-handed; no signed refractive index")]
    MixedHandedness,
}

pub type Result<T> = std::result::Result<T, Error>;
