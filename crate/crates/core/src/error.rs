use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} must be finite and non-negative, got {value}")]
    NegativeParameter { name: &'static str, value: f64 },

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("no coupling point {0} in layout")]
    UnknownPoint(String),

    #[error("unknown check {0:?}")]
    UnknownCheck(String),

    #[error("markovian solver needs zero delays, found a term with delay {0}")]
    NonzeroDelay(f64),

    #[error("invalid integration step: dt = {dt}, t_end = {t_end}")]
    InvalidStep { dt: f64, t_end: f64 },

    #[error("non-finite amplitude at t = {t}; check the equation coefficients")]
    NonFinite { t: f64 },

    #[error("state norm {0} exceeds one")]
    NormExceeded(f64),

    #[error("{oracle} evaluated outside its validity domain ({domain}): {reason}")]
    OutOfDomain {
        oracle: &'static str,
        domain: &'static str,
        reason: String,
    },
}
