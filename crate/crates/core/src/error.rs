use alloc::string::String;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A formula with a `g - 1` (or `g`) denominator was evaluated at a
    /// genus where it is undefined.
    #[error("singular genus {0}")]
    SingularGenus(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    /// The inputs sit in a case the formulas exclude by hypothesis.
    #[error("unsupported case: {0}")]
    Precondition(String),
    #[error("cannot parse {0:?} as an exact fraction")]
    Parse(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
