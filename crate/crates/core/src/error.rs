use thiserror::Error;

/// Errors raised by the spectral solver, diagnostics and run harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected} samples per axis, got {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("negative-order operator applied to a field with nonzero mean ({mean:e})")]
    MeanNotZero { mean: f64 },

    #[error("CFL violation at t = {t}: cfl = {cfl:.4} exceeds limit {limit}")]
    CflViolation { t: f64, cfl: f64, limit: f64 },

    #[error("non-finite coefficient encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("operation undefined at the zero wavenumber")]
    ZeroMode,

    #[error("empty wavenumber support")]
    EmptySupport,

    #[error("series has a non-positive value {value:e} at t = {t}")]
    NonPositiveSeries { t: f64, value: f64 },

    #[error("fit window holds {found} samples, need at least {needed}")]
    InsufficientSamples { found: usize, needed: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown key `{name}`")]
    UnknownKey { line: usize, name: String },

    #[error("`{key}` out of range: {reason}")]
    OutOfRange { key: String, reason: String },

    #[error("unknown preset `{0}`")]
    BadPreset(String),

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
