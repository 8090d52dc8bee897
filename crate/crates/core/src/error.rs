use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} rows, row {row} has {cols} entries")]
    NotSquare { rows: usize, row: usize, cols: usize },

    #[error("matrix is empty")]
    Empty,

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not symmetric: asymmetry {asymmetry:.3e} exceeds {limit:.3e}")]
    NotSymmetric { asymmetry: f64, limit: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:.6e} <= {threshold:.6e}")]
    NotPositiveDefinite { min_eigenvalue: f64, threshold: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point is the zero vector")]
    ZeroVector,

    #[error("point has a non-finite coordinate at index {index}")]
    NonFinitePoint { index: usize },

    #[error("invalid delta vector: {0}")]
    InvalidDelta(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid eigenvalue family: {0}")]
    InvalidFamily(String),

    #[error("bad initial bracket for {family} at n={dim}: {reason}")]
    BadInitialBracket {
        family: String,
        dim: usize,
        reason: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
