//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by the library.
///
/// Numerical decisions (rank, invertibility, diagonalizability) are made
/// relative to the thresholds in [`crate::Tolerance`]; the variants here
/// report which contract failed, not merely that "linear algebra broke".
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A matrix that must have full column rank does not.
    #[error("rank deficient: numerical rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    /// A transform (or eigenvector basis) is numerically singular.
    #[error("not invertible: {0}")]
    NotInvertible(String),

    /// An explicit transform has no well-conditioned eigenvector basis.
    #[error("not diagonalizable: eigenvector basis has numerical rank {basis_rank} of {size}")]
    NotDiagonalizable { basis_rank: usize, size: usize },

    /// Incompatible shapes or sizes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A documented precondition of the operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The computation ran but its result failed a validity check.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A transform description is invalid (not a bijection, zero diagonal
    /// entry, zero scalar, non-square matrix).
    #[error("invalid transform: {0}")]
    InvalidTransform(String),

    /// Tolerances must lie in (0, 1).
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    /// Text input could not be parsed. Positions are 1-based; `column` is a
    /// byte offset within the line.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
