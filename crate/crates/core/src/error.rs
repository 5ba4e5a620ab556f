use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sector mismatch: expected size {expected}, got {got}")]
    SectorMismatch { expected: usize, got: usize },

    #[error("vector is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("coupling matrix has zero bandwidth; cannot rescale")]
    ZeroBandwidth,

    #[error("coupling matrix must have unit bandwidth (got {0})")]
    NotUnitBandwidth(f64),

    #[error("system size {l} exceeds the dense-oracle cap {cap}")]
    OracleCapExceeded { l: usize, cap: usize },

    #[error("empty time grid")]
    EmptyGrid,

    #[error("small-operator complexity vanishes inside the ratio window")]
    DegenerateRatioWindow,

    #[error("degenerate fit: need at least two distinct abscissae")]
    DegenerateFit,

    #[error("ensemble aborted: {failed} of {total} realizations failed (first: {first})")]
    EnsembleFailures {
        failed: usize,
        total: usize,
        first: String,
    },

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
