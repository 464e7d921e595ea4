use thiserror::Error;

use crate::lagdsl::ExprError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the numerical operators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time {t} is outside the represented domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("time {t} is not a node of the sampling grid")]
    OffNode { t: f64 },

    #[error("epsilon {epsilon} is not a positive integer multiple of the grid step {step}")]
    NonMultipleEpsilon { epsilon: f64, step: f64 },

    #[error("padding {pad} is smaller than the required {needed}")]
    PadDeficit { pad: f64, needed: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("sampled data lives on a different grid than the one requested")]
    GridMismatch,

    #[error("operation requires a sampled path")]
    NotSampled,

    #[error("operation requires an analytic path")]
    NotAnalytic,

    #[error("non-finite value at t = {t}")]
    NonFinite { t: f64 },

    #[error("degenerate oscillation: the path does not vary at delta = {delta}")]
    DegenerateOscillation { delta: f64 },

    #[error("wavefunction vanishes (|psi| = {modulus:e}) at t = {t}")]
    WavefunctionZero { t: f64, modulus: f64 },

    #[error("trajectory diverged (|q| = {modulus:e}) at t = {t}")]
    Divergence { t: f64, modulus: f64 },

    #[error("transformed time scale 1 + s*box(tau) vanishes at t = {t}")]
    SingularTransform { t: f64 },

    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl Error {
    /// True for failures caused by the numbers themselves (NaN, blow-up,
    /// vanishing denominators) rather than by invalid input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonFinite { .. }
            | Error::DegenerateOscillation { .. }
            | Error::WavefunctionZero { .. }
            | Error::Divergence { .. }
            | Error::SingularTransform { .. } => true,
            Error::Expr(e) => e.is_numerical(),
            _ => false,
        }
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
