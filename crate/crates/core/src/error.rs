use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by jet, tensor and chart operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Operands disagree on number of variables, truncation order, rank or variance.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A constant term, matrix or form that must be invertible is not.
    #[error("singular: {0}")]
    Singular(String),

    /// An index lies outside its admissible range.
    #[error("index {index} out of range (bound {bound})")]
    Index { index: usize, bound: usize },

    /// Input violates a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Cross-derivative compatibility fails, so no potential exists.
    #[error("integrability violated at indices {indices:?}, multidegree {multidegree:?}")]
    Integrability {
        indices: Vec<usize>,
        multidegree: Vec<u32>,
    },

    /// Truncation order is too low for the requested quantity.
    #[error("insufficient order: {0}")]
    Order(String),

    /// Argument outside the domain of definition (e.g. an isotropic plane).
    #[error("domain error: {0}")]
    Domain(String),

    /// A named algebraic condition on prescribed point data fails.
    #[error("condition ({name}) violated at index {witness:?}")]
    Condition {
        name: &'static str,
        witness: Vec<usize>,
    },

    /// An internal cross-check between two independent routes disagreed.
    #[error("internal consistency check failed: {0}")]
    Postcondition(String),
}

pub type Result<T> = core::result::Result<T, Error>;
