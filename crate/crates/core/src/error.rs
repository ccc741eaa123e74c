use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spin length {0}: 2S must be a non-negative integer")]
    InvalidSpin(f64),

    #[error("invalid Fock cutoff {0}: n_max must be at least 1")]
    InvalidFockCutoff(usize),

    #[error("magnetic quantum number {m} out of range for S = {s}")]
    InvalidProjection { s: f64, m: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("rotation axis must be a unit vector (norm {0})")]
    NonUnitAxis(f64),

    #[error("mean spin vanishes; transverse frame is undefined")]
    ZeroMeanSpin,

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("state is not normalized or physical: {0}")]
    InvalidState(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("per-site Hilbert space of dimension {0} exceeds the cap of {1}")]
    DimensionOverflow(usize, usize),

    #[error("Krylov propagation failed to converge (residual {residual:e})")]
    KrylovNonConvergence { residual: f64 },

    #[error("integrator failed: {0}")]
    IntegratorFailure(String),

    #[error("iteration did not converge after {iterations} iterations (last change {change:e})")]
    NonConvergence { iterations: usize, change: f64 },

    #[error("Fock cutoff too small: tail population {0:e}")]
    CutoffTooSmall(f64),

    #[error("matrix is not symmetric (max deviation {0:e})")]
    NotSymmetric(f64),

    #[error("duplicate coupling distance {0}")]
    DuplicateDistance(usize),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
