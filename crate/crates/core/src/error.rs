use thiserror::Error;

/// Errors raised by the exact-algebra side of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("field mismatch: expected {expected}, found {found}")]
    FieldMismatch { expected: String, found: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("cannot parse scalar {0:?}")]
    ParseScalar(String),

    #[error("points do not span a line")]
    DegenerateLine,

    #[error("degree mismatch at {location}: expected {expected}, found {found}")]
    DegreeMismatch {
        location: String,
        expected: i64,
        found: i64,
    },

    #[error("B*A is not zero: entry ({row}, {col}) equals {entry}")]
    ComplexConditionFailed {
        row: usize,
        col: usize,
        entry: String,
    },

    #[error("unsupported term: {0}")]
    UnsupportedTerm(String),

    #[error("generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },

    #[error("h0(F) = {0}, the multiplication map is only defined for h0(F) = 0")]
    StabilityViolation(usize),

    #[error("twist {k} is out of range: {reason}")]
    RangeError { k: i64, reason: String },

    #[error("monad has the wrong shape: {0}")]
    ShapeError(String),

    #[error("restriction degenerates on the line: {0}")]
    DegenerateRestriction(String),

    #[error("splitting type did not stabilise below window {0}")]
    WindowTooSmall(i64),

    #[error("complex is not a resolution: cohomology in degree {degree} at twist {twist}")]
    NotAResolution { degree: i64, twist: i64 },

    #[error("tower stage {stage}: {source}")]
    TowerStage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("monad is not certified: {0}")]
    Uncertified(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
