//! Error taxonomy shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Operand outside the mathematical domain of an operation,
    /// e.g. log or sqrt of a value whose directed bounds reach below zero.
    #[error("domain error: {0}")]
    Domain(String),

    /// The working precision cannot resolve the requested quantity,
    /// e.g. ceil/floor of an enclosure straddling an integer, or a
    /// quotient whose denominator enclosure straddles zero.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// An internal invariant was violated (indicates a bug or bad input).
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    /// A parameter set fails an admissibility predicate; names the first
    /// violated predicate.
    #[error("inadmissible parameters: {predicate}")]
    Inadmissible { predicate: String },

    /// The optimizer found no admissible point inside the search box.
    #[error("no admissible point found in search box")]
    NoAdmissiblePoint,

    /// Two bounds never exchange dominance over the probed range.
    #[error("no crossover: {0}")]
    NoCrossover(String),

    /// A size or budget limit would be exceeded.
    #[error("size exceeded: {0}")]
    SizeExceeded(String),

    /// A phase specification lacks a certified derivative envelope.
    #[error("envelope missing: {0}")]
    EnvelopeMissing(String),

    /// A quantity required to be monotone is not.
    #[error("monotonicity violation: {0}")]
    MonotonicityViolation(String),

    /// An iterative evaluation failed to reach its tolerance.
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}
