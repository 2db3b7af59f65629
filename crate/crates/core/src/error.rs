use thiserror::Error;

use crate::problem::ProblemKind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{kind} requires n >= {min}, got {got}")]
    SizeOutOfRange { kind: ProblemKind, min: usize, got: usize },

    #[error("values are not a permutation of the problem domain")]
    NotAPermutation,

    #[error("variable index {index} out of range for {len} variables")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("swap indices must differ (both {0})")]
    SameIndex(usize),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
