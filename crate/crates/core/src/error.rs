use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("exponent s = {s} outside {range}")]
    ExponentOutOfRange { s: f64, range: &'static str },

    #[error("negative time t = {0}")]
    NegativeTime(f64),

    #[error("t = {t} is not resolvable with {available} modes; at least {required} are needed")]
    Unresolved {
        t: f64,
        required: usize,
        available: usize,
    },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("point ({0}, {1}) lies outside the closed domain")]
    OutsideDomain(f64, f64),

    #[error("cutoff scale {ell}: {reason}")]
    CutoffScale { ell: f64, reason: String },

    #[error("displacement ({0}, {1}) not admissible: {2}")]
    Displacement(i64, i64, String),

    #[error("empty sweep: {0}")]
    EmptySweep(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("blow-up at t = {t}: {reason}")]
    BlowUp { t: f64, reason: String },

    #[error("resolution failure at t = {t}: {reason}")]
    Resolution { t: f64, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
