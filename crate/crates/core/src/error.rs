use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    #[error("{0}")]
    UnsupportedParameter(String),

    #[error("invalid bump profile: {0}")]
    InvalidProfile(String),

    /// The frequency grid cannot hold the support of a convolution.
    #[error("support overflow: convolution support [{lo}, {hi}] exceeds grid [{xi_min}, {xi_max}]")]
    SupportOverflow { lo: f64, hi: f64, xi_min: f64, xi_max: f64 },

    #[error("N = {n} is below the threshold N(t) = {min} for t = {t}")]
    BelowThreshold { n: u64, min: u64, t: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
