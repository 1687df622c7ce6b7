use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error conditions surfaced by builders, guards and integrators.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("slot {slot} out of range for a {nslots}-subsystem space")]
    SlotOutOfRange { slot: usize, nslots: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("state validity violated: {0}")]
    InvalidState(String),

    #[error("truncation risk: {0}")]
    Truncation(String),

    #[error("degenerate junction: effective Josephson energy {0:.3e} GHz at this flux")]
    DegenerateJunction(f64),

    #[error("unsupported basis: {0}")]
    UnsupportedBasis(String),

    #[error(
        "near-resonant pair ({i},{l}): |E_i - E_l - omega| = {gap:.3e} GHz; \
         dispersive approximation invalid"
    )]
    NearResonantPair { i: usize, l: usize, gap: f64 },

    #[error("integration instability: {0}")]
    Instability(String),

    #[error("failed to converge: {0}")]
    NonConvergence(String),

    #[error("protocol invalid: {0}")]
    ProtocolInvalid(String),
}
