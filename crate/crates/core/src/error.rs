use thiserror::Error;

pub type Result<T, E = BoundsError> = std::result::Result<T, E>;

/// Failure modes of the operator algebra, the models and the bound engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows} rows, {cols} entries in a row")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not Hermitian: max |A - A^H| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("operator has a negative eigenvalue {eigenvalue:e} (largest {largest:e})")]
    Negative { eigenvalue: f64, largest: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate test point: {0}")]
    DegenerateTestPoint(String),

    #[error("equation has weight on the kernel of the state: residual {residual:e} (tolerance {tolerance:e})")]
    UnsolvableComponent { residual: f64, tolerance: f64 },

    #[error("singular Weiss-Weinstein assembly (test points {test_points:?}): {detail}")]
    SingularAssembly { test_points: Vec<usize>, detail: String },

    #[error("unsupported model: {0}")]
    Unsupported(String),

    #[error("objective is non-finite on every scan point")]
    EmptyScan,

    #[error("no sign change on bracket [{lower}, {upper}]")]
    Bracket { lower: f64, upper: f64 },

    #[error("model and POVM are inconsistent: joint probability {probability:e} < 0")]
    InconsistentModel { probability: f64 },

    #[error("generator has no dynamics on this state (H+ = 0)")]
    NoDynamics,

    #[error("model file: {0}")]
    ModelFile(String),
}
