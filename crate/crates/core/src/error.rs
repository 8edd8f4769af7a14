use std::path::PathBuf;

/// Errors raised anywhere in the isotropy-testing pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("direction of the zero vector is undefined")]
    ZeroVector,

    #[error("point ({x}, {y}) lies outside the observation window")]
    PointOutsideWindow { x: f64, y: f64 },

    #[error("pattern has {got} points, operation needs at least {need}")]
    TooFewPoints { need: usize, got: usize },

    #[error("no usable points: every cone neighbour lies outside its eroded window")]
    NoUsablePoints,

    #[error("bandwidth too small for grid: no frequency within {bandwidth} rad of angle {angle}")]
    BandwidthTooSmall { angle: f64, bandwidth: f64 },

    #[error("zero window overlap for a contributing pair")]
    ZeroOverlap,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("degenerate replicate ensemble: every coordinate has zero variance")]
    DegenerateEnsemble,

    #[error("null model must be isotropic (a = {a})")]
    AnisotropicNullModel { a: f64 },

    #[error(
        "covariance embedding is not non-negative definite \
         (grid {nx}x{ny}, spacing {spacing}, min eigenvalue {min_eigenvalue:e})"
    )]
    EmbeddingFailure {
        nx: usize,
        ny: usize,
        spacing: f64,
        min_eigenvalue: f64,
    },

    #[error("replicate {index} failed: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate point ({x}, {y}) at line {line}")]
    DuplicatePoint { x: f64, y: f64, line: usize },

    #[error("{count} point(s) outside the window, first at line {first_line}: ({x}, {y})")]
    PointsOutside {
        count: usize,
        first_line: usize,
        x: f64,
        y: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
