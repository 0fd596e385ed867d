use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two operands disagree on a dimension.
    Dimension {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    /// A scalar or structural argument is outside its domain.
    Argument(String),
    /// Backward pass requested without a cached forward pass.
    MissingCache,
    /// Training produced a non-finite loss.
    Diverged { epoch: usize },
    /// Training configuration violates an invariant.
    Config(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn dim(op: &'static str, expected: usize, found: usize) -> Self {
        Error::Dimension {
            op,
            expected,
            found,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension {
                op,
                expected,
                found,
            } => write!(f, "{op}: dimension mismatch (expected {expected}, found {found})"),
            Error::Argument(msg) => write!(f, "invalid argument: {msg}"),
            Error::MissingCache => f.write_str("backward pass needs a cached forward pass"),
            Error::Diverged { epoch } => write!(f, "training diverged at epoch {epoch}"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
