use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("photon number {requested} exceeds state cutoff {cutoff}")]
    CutoffExceeded { requested: usize, cutoff: usize },

    /// The derivative of ⟨A_M⟩ vanishes, so error propagation is undefined.
    #[error("phase-insensitive point at phi = {phi} (M = {m})")]
    PhaseInsensitive { m: usize, phi: f64 },

    #[error("coherence at order M = {0} vanishes; no phase sensitivity")]
    NoPhaseSensitivity(usize),

    #[error("non-finite value while evaluating {expr}")]
    NonFinite { expr: &'static str },

    #[error("quadrature did not converge (last {last:e}, previous {previous:e})")]
    QuadratureNotConverged { last: f64, previous: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    EigenNotConverged { sweeps: usize, off_norm: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
