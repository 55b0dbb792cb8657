use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: entries ({row},{col}) and ({col},{row}) differ by {difference:.3e}")]
    NotSymmetric { row: usize, col: usize, difference: f64 },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch { expected: (usize, usize), found: (usize, usize) },

    #[error("family members {left} and {right} do not commute (commutator residual {residual:.3e})")]
    NonCommuting { left: usize, right: usize, residual: f64 },

    #[error("basis count mismatch for {what}: expected {expected}, found {found}")]
    BasisCount { what: String, expected: usize, found: usize },

    #[error("spectral construction failed: {0}")]
    Spectral(String),

    #[error("singular eigenmatrix {which} (condition estimate {condition:.3e})")]
    Singular { which: String, condition: f64 },

    #[error("integer overflow during exact elimination")]
    Overflow,

    #[error("{0}")]
    Design(String),

    #[error("graph is disconnected: {first} and {second} lie in different components")]
    Disconnected { first: String, second: String },

    #[error("{location} is not constant: coordinates ({},{}) and ({},{}) differ", first.0, first.1, second.0, second.1)]
    Defect { location: String, first: (usize, usize), second: (usize, usize) },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("unsupported size: {0}")]
    Unsupported(String),

    #[error("invalid tolerance {0}: must be positive and finite")]
    InvalidTolerance(f64),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}
