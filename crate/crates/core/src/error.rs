use thiserror::Error;

use crate::coeffring::CoeffError;
use crate::datum::Series;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid rank {rank} for series {series}")]
    InvalidRank { series: Series, rank: u32 },
    #[error("numeric assignment hits an excluded value: {0}")]
    NumericAssignmentHitsExcludedRoot(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("bracket operand is not homogeneous")]
    NonHomogeneousOperand,
    #[error("projection for (k,m)=({k},{m}), i={i} is not proportional to the expected tensor: {witness}")]
    NonProportionalProjection {
        k: u32,
        m: u32,
        i: u32,
        witness: String,
    },
    #[error("theorem mismatch: {witness}")]
    TheoremMismatch { witness: String },
    #[error("evaluation point is degenerate: {0}")]
    DegenerateEvaluationPoint(String),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

pub type Result<T> = std::result::Result<T, Error>;
