//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),

    #[error("vertex `{0}` has level 0, levels must be positive")]
    ZeroLevel(String),

    #[error("dimension vector has {got} entries but the quiver has {expected} vertices")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("slope of the zero dimension vector is undefined")]
    ZeroDimension,

    #[error("dimension vector is not coprime for the given stability")]
    NotCoprime,

    #[error("sizes {0} and {1} are not coprime")]
    NotCoprimeSizes(u32, u32),

    #[error("decomposition is not {0}-admissible")]
    NotAdmissible(u32),

    #[error("component {0} is not semistable")]
    NotSemistable(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
