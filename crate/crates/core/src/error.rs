use alloc::string::String;

/// Errors raised by element construction, operator application and the
/// solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A stored coefficient or parameter is NaN or infinite.
    #[error("non-finite value in {what}")]
    NonFinite {
        /// Which field carried the value.
        what: &'static str,
    },
    /// A geometric tail with `|ratio| >= 1` has no finite norm.
    #[error("geometric tail ratio {ratio} must satisfy |ratio| < 1")]
    DivergentTail {
        /// Offending ratio.
        ratio: f64,
    },
    /// The basis description is malformed.
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    /// The operator data is malformed or inconsistent with its class.
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    /// An operation needs a class the operator does not have.
    #[error("class mismatch: {0}")]
    ClassMismatch(String),
    /// No closed-form image exists for this operator/tail combination.
    #[error("unsupported analytic composition: {0}")]
    UnsupportedComposition(String),
    /// `(I - A)` could not be inverted.
    #[error("singular linear system")]
    Singular,
    /// A scalar argument is outside its admissible range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter {
        /// Parameter name.
        name: &'static str,
        /// What is wrong with it.
        reason: String,
    },
    /// The configured probe horizon was too short.
    #[error("probe horizon exhausted: {0}")]
    HorizonExhausted(String),
    /// A delay scenario violates one of its invariants.
    #[error("invalid delay scenario: {0}")]
    InvalidScenario(String),
    /// An index was outside the available range.
    #[error("index {index} out of range (len {len})")]
    OutOfRange {
        /// Requested index.
        index: usize,
        /// Number of available items.
        len: usize,
    },
}
