use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {dim} exceeds the supported maximum of {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not unitary: ‖U†U − I‖_F = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("not a density matrix: {0}")]
    InvalidDensity(String),

    #[error("not a normalized state: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("columns are not orthonormal: ‖V†V − I‖_F = {deviation:.3e}")]
    NotIsometry { deviation: f64 },

    #[error("bases are not completely incompatible (smallest minor {min_abs_minor:.3e})")]
    NotCompletelyIncompatible { min_abs_minor: f64 },

    #[error("linear program did not terminate within {iterations} iterations")]
    SolverStall { iterations: usize },

    #[error("target lies outside the convex hull of the generators")]
    OutsideHull,

    #[error("affine hull of the generators has dimension {0}")]
    DegenerateHull(usize),

    #[error("too many generators: {count} (limit {limit})")]
    TooManyGenerators { count: usize, limit: usize },

    #[error(
        "numerically indeterminate: separation margin {margin:.3e} below threshold {threshold:.3e}"
    )]
    Indeterminate { margin: f64, threshold: f64 },

    #[error("certificate failed re-validation: {0}")]
    CertificateRejected(String),

    #[error("value {value} outside the allowed range {range}")]
    OutOfRange { value: f64, range: String },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("{location}: {message}")]
    Parse { location: String, message: String },
}

impl Error {
    /// Errors caused by malformed or invalid input rather than by the
    /// numerics.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence { .. }
                | Error::SolverStall { .. }
                | Error::CertificateRejected(_)
                | Error::Indeterminate { .. }
        )
    }
}
