//! Error type shared by every module of the crate.
//!
//! Errors fall into three behavioural classes: domain errors (rejected
//! arguments, inexact operations), resource errors (a configured cap was
//! exceeded and the computation refused to continue), and internal errors
//! (a postcondition the code itself guarantees was found violated).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("argument must be a positive integer")]
    ZeroArgument,

    #[error("{0} exceeds the factorization bound")]
    FactorBoundExceeded(String),

    #[error("sequence of length {actual} does not fit truncation order {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("truncation orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("constant term must be 1 or -1 to invert")]
    NonUnitConstant,

    #[error("division by the zero polynomial")]
    ZeroDivisor,

    #[error("divisor polynomial must have leading coefficient 1 or -1")]
    NonMonicDivisor,

    #[error("polynomial division left a nonzero remainder")]
    InexactDivision,

    #[error("{divisor} does not divide {n}")]
    NotADivisor { divisor: u64, n: u64 },

    #[error("dense polynomial of degree {0} exceeds the materialization cap")]
    DegreeCapExceeded(u64),

    #[error("{count} divisors exceeds the cap of {cap}")]
    DivisorCapExceeded { count: usize, cap: usize },

    #[error("membership search exceeded the cap of {0} states")]
    StateCapExceeded(u64),

    #[error("witness construction would need {0} prime labels, over the configured budget")]
    WitnessBudgetExceeded(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("membership test failed at n = {n}: {source}")]
    CountFailed { n: u64, source: Box<Error> },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True when the error reports an exceeded resource cap rather than a
    /// rejected argument.
    pub fn is_resource_limit(&self) -> bool {
        match self {
            Error::FactorBoundExceeded(_)
            | Error::DegreeCapExceeded(_)
            | Error::DivisorCapExceeded { .. }
            | Error::StateCapExceeded(_)
            | Error::WitnessBudgetExceeded(_) => true,
            Error::CountFailed { source, .. } => source.is_resource_limit(),
            _ => false,
        }
    }

    /// True when the error reports a violated internal invariant.
    pub fn is_internal(&self) -> bool {
        match self {
            Error::Internal(_) => true,
            Error::CountFailed { source, .. } => source.is_internal(),
            _ => false,
        }
    }
}
