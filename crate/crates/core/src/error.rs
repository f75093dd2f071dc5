//! Error type shared across the crate.

/// Everything that can go wrong while building or checking a solution.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Parameters outside the admissible range (N < 3, p <= 1, bad tolerances).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Grid construction or grid compatibility failure.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A tail exponent makes an integral diverge (inner mass or outer decay).
    #[error("non-integrable tail: {0}")]
    NonIntegrableTail(String),

    /// The requested operation needs a hypothesis that does not hold.
    #[error("regime violation: {0}")]
    Regime(String),

    /// The ODE integrator could not reach the requested accuracy or time.
    #[error("profile integration failed: {0}")]
    Integration(String),

    /// Oscillatory profiles (p > p_c) cannot seed fast-decaying solutions.
    #[error("profile is oscillatory (p > p_c); no monotone orbit to seed from")]
    OscillatoryProfile,

    /// A least-squares window was empty, too short, or degenerate.
    #[error("fit window unusable: {0}")]
    FitWindow(String),

    /// Monotonicity of the Picard iterates broke beyond the quadrature
    /// tolerance; the grid is too coarse for the requested accuracy.
    #[error("monotonicity violated at iteration {iteration} by {violation:.3e} (tolerance {tolerance:.3e})")]
    MonotonicityViolation {
        iteration: usize,
        violation: f64,
        tolerance: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
