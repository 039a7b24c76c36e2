use thiserror::Error;

/// Errors shared by all grid-level operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    #[error("sample count {0} is not a power of two (or is below 8)")]
    BadSampleCount(usize),
    #[error("half-width must be positive and finite, got {0}")]
    BadHalfWidth(f64),
    #[error("expected a {expected:?}-side function, got {got:?}")]
    SideMismatch {
        expected: crate::grid::Side,
        got: crate::grid::Side,
    },
    #[error("functions live on different grids")]
    GridMismatch,
    #[error("L^p exponent must be positive, got {0}")]
    BadExponent(f64),
    #[error("L^p exponent must lie in (1, inf), got {0}")]
    ExponentOutOfRange(f64),
    #[error("scale 2^{0} is not representable on this grid")]
    ScaleOutOfRange(i32),
    #[error("grid is not dyadic (half-width and spacing must be powers of two)")]
    NonDyadicGrid,
    #[error("symbol parameter `{0}` must be nonzero")]
    ZeroParameter(&'static str),
    #[error("quadrature oracle needs at least 10 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("no quadrature rule for symbol kind `{0}`")]
    UnsupportedKind(&'static str),
    #[error("windowed symbol base must be c1_indicator, a gen22 factor, or constant")]
    UnsupportedBase,
    #[error("resolution {resolution} is below the oversampling floor 8*n_max = {floor}")]
    InsufficientResolution { resolution: usize, floor: usize },
    #[error("resolution {0} must be a power of two")]
    BadResolution(usize),
    #[error("truncation epsilon {eps} is below the grid spacing {h}")]
    EpsilonBelowSpacing { eps: f64, h: f64 },
    #[error("interval [{left}, {right}] leaves the grid domain")]
    IntervalOutOfDomain { left: f64, right: f64 },
    #[error("model operator needs at least two psi-type bump slots, got {0}")]
    TooFewPsiSlots(usize),
    #[error("square function requires a psi-type family")]
    PhiFamilyRejected,
    #[error("Calderon-Zygmund level must be positive, got {0}")]
    BadLevel(f64),
    #[error("norm-growth measurement needs at least one trial")]
    NoTrials,
    #[error("empty table")]
    EmptyTable,
}

pub type Result<T> = std::result::Result<T, CoreError>;
