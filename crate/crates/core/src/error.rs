use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time {t:e} s is outside the pulse window [0, {duration:e}] s")]
    OutsideWindow { t: f64, duration: f64 },

    #[error("|chi'| exceeds |delta/2| at t = {t:e} s (radicand {radicand:e})")]
    ConstraintViolation { t: f64, radicand: f64 },

    #[error("sin(2 chi) vanishes at t = {t:e} s")]
    Singularity { t: f64 },

    #[error("Hamiltonian sample at t = {t:e} s is not Hermitian (residual {residual:e})")]
    NonHermitian { t: f64, residual: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("matrix is not unitary (residual {0:e})")]
    NonUnitary(f64),

    #[error("local invariants differ from the target's by {distance:e}; the gates are not locally equivalent")]
    InvariantMismatch { distance: f64 },

    #[error("unitary is not diagonal enough for a phase readout (off-diagonal {residual:e})")]
    NotDiagonal { residual: f64 },

    #[error("unknown tag `{0}`")]
    UnknownTag(String),

    #[error("empty validity window: {0}")]
    EmptyWindow(String),

    #[error("malformed parameter file: {0}")]
    Parse(#[from] serde_json::Error),
}
