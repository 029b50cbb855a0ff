use alloc::string::String;

/// Errors raised by the estimation and simulation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The inputs were individually valid but the computation cannot proceed
    /// (degenerate variance, rank-deficient design, too many failures).
    #[error("invalid state: {0}")]
    InvalidState(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid_arg {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}

macro_rules! invalid_state {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidState(alloc::format!($($arg)*))
    };
}

pub(crate) use invalid_arg;
pub(crate) use invalid_state;
