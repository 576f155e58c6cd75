use alloc::string::String;

use crate::solenoid::HElement;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not an element of the character group")]
    NotMember(HElement),
    #[error("{0} is not divisible in the character group")]
    NotDivisible(HElement),
    #[error("{0} lies outside the evaluation domain")]
    Domain(HElement),
    #[error("invariance set is not closed: {0}")]
    ClosureViolation(String),
    #[error("restriction is not periodic with period {period}")]
    NotPeriodic { period: u64 },
    #[error("{points} points exceed the budget of {cap}")]
    BudgetExceeded { points: u128, cap: u64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("matrix entry ({row}, {col}) is not a homomorphism")]
    NotHomomorphism { row: usize, col: usize },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
