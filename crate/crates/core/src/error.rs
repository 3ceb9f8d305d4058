use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("operation `{op}` is not defined for {basis} states")]
    UnsupportedBasis { op: &'static str, basis: &'static str },

    #[error("invalid norm scale: {0}")]
    InvalidScale(String),

    #[error("degenerate chart at x = {x:?}: smallest singular value {smallest_singular:e} below floor {floor:e}")]
    DegenerateChart {
        x: Vec<f64>,
        smallest_singular: f64,
        floor: f64,
    },

    #[error("chart point {x:?} outside domain")]
    OutsideDomain { x: Vec<f64> },

    #[error("invalid sampling spec: {0}")]
    InvalidSampling(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("drift forms disagree: {0}")]
    InconsistentForms(String),

    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
