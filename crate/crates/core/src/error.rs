use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("response set has zero variance")]
    ZeroVariance,

    #[error("insufficient data: requested {requested} points but only {available} available")]
    InsufficientData { requested: usize, available: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("linear system is singular or not positive definite")]
    SingularSystem,

    #[error("kernel matrix is degenerate: no eigenvalue above the floor")]
    DegenerateKernel,

    #[error("loss evaluation returned NaN or -inf for particle {particle}")]
    NonFiniteLoss { particle: usize },

    #[error("every candidate latent dimension failed to produce a surrogate")]
    AllDimensionsFailed,

    #[error("point coordinate {value} at index {index} lies outside the unit interval")]
    DomainViolation { index: usize, value: f64 },

    #[error("dimension {0} is too small, need at least 7")]
    DimTooSmall(usize),

    #[error("Sobol dimension {0} is not supported (1..={max})", max = crate::bench::MAX_SOBOL_DIM)]
    UnsupportedDimension(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse { row: usize, column: usize, message: String },

    #[error("missing response column `y`")]
    MissingResponseColumn,

    #[error("model file version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("corrupt model file: {0}")]
    CorruptFile(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
