use thiserror::Error;

/// Errors raised by the series, lattice, analysis and engine layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dilation radius must lie in (0, 1], got {0}")]
    InvalidDilation(f64),

    #[error("kernel node must lie in the open unit disk, got |lambda| = {0}")]
    NodeOutsideDisk(f64),

    #[error("grid of {grid} points under-resolves a degree-{degree} series (need a power of two >= {required})")]
    UnderResolvedGrid {
        grid: usize,
        degree: usize,
        required: usize,
    },

    #[error("weight sequence is degenerate at n = {index}: {reason}")]
    DegenerateWeight { index: usize, reason: String },

    #[error("series for {what} did not converge within {terms} terms")]
    Nonconvergent { what: &'static str, terms: usize },

    #[error("radii must be strictly increasing inside (0, 1): {0}")]
    InvalidRadii(String),

    #[error("layer {layer} would need {points} points, above the cap of {cap}")]
    TooManyPoints {
        layer: usize,
        points: usize,
        cap: usize,
    },

    #[error("nothing to decompose: the function has zero norm")]
    ZeroFunction,

    #[error("schedule exhausted: no layer at index >= {start} meets the dilation criterion")]
    ScheduleExhausted { start: usize },

    #[error("contraction failure at schedule layer {layer}: ratio {ratio:.6} >= 1")]
    ContractionFailure { layer: usize, ratio: f64 },

    #[error("layer {layer} needs truncation degree {needed}, above the cap of {cap}")]
    DegreeLimit {
        layer: usize,
        needed: usize,
        cap: usize,
    },

    #[error("layer {layer} is incompatible with this step: {reason}")]
    IncompatibleLayer { layer: usize, reason: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
