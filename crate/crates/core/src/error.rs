//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by difficulty computations, bound evaluators and the
/// simulator.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A distribution parameter or mean is outside its valid domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The instance has no well-defined correct answer (tied argmax, mean
    /// exactly at the threshold, mean vector exactly on the half-space
    /// boundary).
    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),

    /// A weight vector is not a valid point of the (interior of the) simplex.
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    /// The requested task/family/algorithm combination is not supported.
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),

    /// The simplex optimizer could not certify the requested duality gap.
    #[error("optimizer failure: {0}")]
    OptimizerFailure(String),

    /// An argument violates the documented range of an operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A corner construction violates its invariants.
    #[error("invalid construction: {0}")]
    InvalidConstruction(String),

    /// A stated precondition of a theorem evaluator does not hold.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
