use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown distribution `{0}` (expected one of uniform, exponential, power, pareto, normal, laplace, logistic)")]
    UnknownDistribution(String),

    #[error("malformed distribution descriptor `{descriptor}`: {reason}")]
    Descriptor { descriptor: String, reason: String },

    #[error("parameter `{name}` = {value} is out of domain: {reason}")]
    Parameter {
        name: String,
        value: f64,
        reason: &'static str,
    },

    #[error("{what} = {value} is outside the open unit interval")]
    OutsideUnitInterval { what: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<()> {
        if value > 0.0 && value < 1.0 {
            Ok(())
        } else {
            Err(Error::OutsideUnitInterval { what, value })
        }
    }
}
