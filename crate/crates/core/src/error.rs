use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("work guard exceeded: {work} terms > limit {limit}")]
    WorkGuard { work: u128, limit: u128 },

    #[error("time step {step} too coarse for the oscillatory phases; need h <= {required}")]
    StepTooLarge { step: f64, required: f64 },

    #[error("time {time} is not on the path grid")]
    OffGrid { time: f64 },

    #[error("time mismatch: {left} vs {right}")]
    TimeMismatch { left: f64, right: f64 },

    #[error("solution blew up at tau = {time}: |u|^2 = {norm_sq} exceeds guard {guard}")]
    BlowUp { time: f64, norm_sq: f64, guard: f64 },

    #[error("density went negative ({value}) at r = {radius}, tau = {time}")]
    NegativeDensity { value: f64, radius: f64, time: f64 },

    #[error("fixed point did not converge in {iterations} iterations; last residual {}", residuals.last().copied().unwrap_or(f64::NAN))]
    NoConvergence {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("degenerate diagram: {0}")]
    DegenerateDiagram(String),

    #[error("phase does not fit the skew template: {0}")]
    PhaseResidue(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
