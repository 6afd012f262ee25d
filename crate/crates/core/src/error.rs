use thiserror::Error;

/// Errors produced by the numerics layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty region")]
    EmptyRegion,

    #[error("scaling violates P0 at sample {index}: 1/q = {reciprocal}")]
    ScalingViolatesP0 { index: usize, reciprocal: f64 },

    #[error("conjugate undefined outside P (p^- = {p_minus})")]
    ConjugateUndefined { p_minus: f64 },

    #[error("dilation factor must be positive, got {0}")]
    NonpositiveDilation(f64),

    #[error("index subset A must be nonempty")]
    EmptyIndexSet,

    #[error("kernel singularity: all arguments zero")]
    KernelSingularity,

    #[error("alpha = {alpha} outside (0, {upper})")]
    AlphaOutOfRange { alpha: f64, upper: f64 },

    #[error("slot index {j} out of range for m = {m}")]
    SlotOutOfRange { j: usize, m: usize },

    #[error("insufficient resolution for degree {degree}: cube spans {cells} cells, need {needed}")]
    InsufficientResolution {
        degree: i64,
        cells: usize,
        needed: usize,
    },

    #[error("projection annihilated the candidate after {retries} retries")]
    ProjectionDegenerate { retries: usize },

    #[error("lq exponent must exceed 1, got {0}")]
    LqOutOfRange(f64),

    #[error("bump dictionary is not certified: {0}")]
    UncertifiedDictionary(String),

    #[error("empty cube family")]
    EmptyCubeFamily,

    #[error("point {point:?} violates the E_A condition for cube {cube}")]
    OutsideRegion { point: Vec<f64>, cube: usize },

    #[error("norm proxy degenerate: zero RHS with nonzero LHS")]
    DegenerateNormProxy,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
