use thiserror::Error;

/// Errors raised by the library. The variants follow the failure classes of
/// the command line contract: argument, domain, configuration and hypothesis
/// errors are caller mistakes; `NoSolution` and `NotConverged` are numerical
/// outcomes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("point outside the admissible domain: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    Configuration(String),
    #[error("theorem hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($fmt:tt)+) => {
        // Bound first so a NaN comparison counts as a failed check.
        let holds: bool = $cond;
        if !holds {
            return Err($crate::Error::$variant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
