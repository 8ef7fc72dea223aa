use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A velocity at or above the speed of light.
    #[error("velocity magnitude |beta| = {0} must be strictly less than 1")]
    Superluminal(f64),

    /// Argument outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A composed Lorentz matrix that should have been a pure rotation was not.
    #[error("expected a pure rotation, deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    NotARotation { deviation: f64, tolerance: f64 },

    /// Non-finite or otherwise malformed sample data.
    #[error("data error: {0}")]
    Data(String),

    /// Incompatible operands (mismatched spins, carriers or grids).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge: estimate {estimate:e} with error {error:e} after {evaluations} evaluations")]
    Quadrature {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    /// Denominator of the causality ratio is numerically zero.
    #[error("causality ratio diverges: enclosed initial probability {0:e} is below 1e-300")]
    DivergingRatio(f64),

    /// Narrow-packet bound too large for the average-event approximation.
    #[error("packet too wide: bound beta^2 (sigma_p/|p|)^2 = {bound:e} must be below {limit}")]
    PacketTooWide { bound: f64, limit: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
