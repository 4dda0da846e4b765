use thiserror::Error;

/// Errors raised anywhere in the mesh/assembly/solve pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("coefficient violation in element {element} at ({x:.6}, {y:.6}, {z:.6}): {msg}", x = point[0], y = point[1], z = point[2])]
    Coefficient { element: usize, point: [f64; 3], msg: String },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch { what: &'static str, expected: usize, found: usize },

    #[error("singular {what} (condition estimate {condition:.3e})")]
    Singular { what: &'static str, condition: f64 },

    #[error("iteration did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("zero reference norm for {0}")]
    ZeroNorm(&'static str),

    #[error("system dimension {dim} exceeds cap {cap}")]
    CapExceeded { dim: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
