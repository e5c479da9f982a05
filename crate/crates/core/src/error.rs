use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("the zero polynomial has an empty frame")]
    EmptyFrame,

    #[error("exponent vector {0} is not in the frame of the polynomial")]
    NotInFrame(String),

    #[error("unknown id {0} is not registered in this context")]
    UnregisteredUnknown(usize),

    #[error("pop on an empty assertion stack")]
    EmptyStack,

    #[error("no positive base found within {0} squarings")]
    BaseBudgetExhausted(u32),

    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
