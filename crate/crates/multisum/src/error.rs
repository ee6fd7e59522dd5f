//! Errors shared by the evaluators.

use num_bigint::BigInt;

use crate::instance::{IdentityLabel, MomentLabelError, ValidationError};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Moment(#[from] MomentLabelError),
    #[error("identity {label} requires the secondary weight vector y")]
    MissingY { label: IdentityLabel },
    #[error("restricted evaluation requires n")]
    MissingN,
    #[error("unrestricted evaluation does not take n (found n = {n})")]
    UnexpectedN { n: u64 },
    #[error(
        "degenerate denominator: the falling factorial of A0-C0 = {difference} with \
         {degree} factors vanishes, so the printed closed form is undefined here"
    )]
    DegenerateDenominator { difference: BigInt, degree: u32 },
}

impl EvalError {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, EvalError::DegenerateDenominator { .. })
    }
}
