use thiserror::Error;

/// Errors raised across state construction, moment evaluation, bound
/// computation and estimation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation dimension {dim} too small, need at least {required}")]
    DimTooSmall { dim: usize, required: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("moment order {0} unsupported (maximum is 8)")]
    UnsupportedOrder(usize),

    #[error("non-positive variance {value:e} at theta = {theta}")]
    NonPositiveVariance { theta: f64, value: f64 },

    #[error("singular matrix, null direction {0}")]
    Singular(String),

    #[error("no closed form for {0}; use the numeric path")]
    NoClosedForm(String),

    #[error("rejection envelope violated: ratio {ratio:.6} exceeds bound {bound:.6}")]
    EnvelopeViolation { ratio: f64, bound: f64 },

    #[error("no bracket: {0}")]
    NoBracket(String),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
