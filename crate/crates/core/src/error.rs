use thiserror::Error;

/// Errors raised by the analytic formulas and the numerical oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{quantity} has an imaginary residue {imag:e} (real part {real:e})")]
    ImaginaryResidue {
        quantity: &'static str,
        real: f64,
        imag: f64,
    },

    #[error("logarithm argument {value:e} is not positive in {quantity}")]
    NonPositiveLogArgument { quantity: &'static str, value: f64 },

    #[error("probability P({n}) = {value:e} is negative beyond tolerance")]
    NegativeProbability { n: u32, value: f64 },

    #[error("hypergeometric lower parameter {0} is a non-positive integer")]
    PoleParameter(f64),

    #[error("truncation {n_tr} too small: {reason}")]
    Truncation { n_tr: usize, reason: String },

    #[error("oracle integration drifted: {0}")]
    Drift(String),

    #[error("unresolved: {0}")]
    Unresolved(String),

    #[error("root bracket [{lo}, {hi}] does not straddle a sign change")]
    NoBracket { lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
