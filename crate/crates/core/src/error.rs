use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A state or slice does not have the coordinate count of its space.
    DimensionMismatch { expected: usize, found: usize },
    /// A caller broke a documented precondition.
    ContractViolation(String),
    /// A constructed object failed one of its invariants. The first field
    /// names the invariant.
    Invariant(&'static str, String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected} coordinates, found {found}")
            }
            Error::ContractViolation(msg) => write!(f, "contract violation: {msg}"),
            Error::Invariant(name, msg) => write!(f, "invariant `{name}` violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::ContractViolation(msg.into())
}
