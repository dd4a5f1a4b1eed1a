use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vectors belong to different spaces")]
    SpaceMismatch,

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("metric weight {value} at index {index} is below the admissible minimum")]
    DegenerateWeight { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty subdifferential at the given point")]
    EmptySubdifferential,

    #[error("{0} has no representation of the subdifferential at the origin")]
    NoKRepresentation(&'static str),

    #[error("point lies outside the smooth region of {0}")]
    NotSmoothHere(&'static str),

    #[error("solver `{solver}` does not support functional `{functional}`")]
    UnsupportedFunctional { functional: String, solver: String },

    #[error("more than {0} events fired; aborting")]
    EventCascade(usize),

    #[error("trajectory left the smooth region at s = {s}")]
    LeftSmoothRegion { s: f64 },

    #[error("root bracket failed: {0}")]
    NoBracket(String),

    #[error("insufficient data: need at least {needed} points, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("grid too coarse: support half-width {required} exceeds grid extent {available}")]
    GridTooCoarse { required: f64, available: f64 },

    #[error("path is not an energetic solution (worst residual {residual:e})")]
    NotEnergetic { residual: f64 },

    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("not an eigenvector (relative residual {residual:e})")]
    NotEigenvector { residual: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown {what} `{name}`")]
    UnknownName { what: &'static str, name: String },
}
