use crate::world::ValidationReport;

/// Errors surfaced by the library. Each variant maps to a stable
/// machine-readable code via [`Error::code`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("invalid world: {0}")]
    InvalidWorld(ValidationReport),

    #[error("coordinate dimension mismatch: expected {expected}, found {found} at point {index}")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        index: usize,
    },

    #[error("index {index} out of range for {len} points")]
    Index { index: usize, len: usize },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("simplex grid with {size} points exceeds the cap of {cap}; lower the resolution")]
    GridTooLarge { size: u128, cap: usize },

    #[error("delta must lie in (0, 1), got {0}")]
    InvalidDelta(f64),

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("world points carry no 2-D coordinates")]
    NoCoords,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "PARSE_ERROR",
            Error::InvalidWorld(_) => "INVALID_WORLD",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::Index { .. } => "INDEX_ERROR",
            Error::EmptyDataset => "EMPTY_DATASET",
            Error::GridTooLarge { .. } => "GRID_TOO_LARGE",
            Error::InvalidDelta(_) => "INVALID_DELTA",
            Error::InvalidMixture(_) => "INVALID_MIXTURE",
            Error::Config(_) => "CONFIG_ERROR",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::NoCoords => "NO_COORDS",
            Error::Io(_) => "IO_ERROR",
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
