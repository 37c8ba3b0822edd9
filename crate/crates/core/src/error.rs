use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(String),
    /// The operation does not apply to this configuration (e.g. wrong polarization).
    Usage(String),
    /// A required configuration value is missing or inconsistent.
    Configuration(String),
    /// The configuration is valid physics but not covered by the series path.
    Unsupported(String),
    /// A series or quadrature did not reach the requested tolerance.
    Accuracy {
        what: String,
        value: f64,
        error_estimate: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Usage(m) => write!(f, "usage error: {m}"),
            Error::Configuration(m) => write!(f, "configuration error: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported configuration: {m}"),
            Error::Accuracy {
                what,
                value,
                error_estimate,
            } => write!(
                f,
                "{what} did not converge: value {value:e}, error estimate {error_estimate:e}"
            ),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}
pub(crate) use domain;
