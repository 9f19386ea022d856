use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("coefficient violates 0 <= c(t) <= mu at t = {t}: c = {value}, mu = {bound}")]
    CoefficientOutOfRange { t: f64, value: f64, bound: f64 },

    #[error("coefficient has no analytic derivative; {operation} needs one")]
    MissingDerivative { operation: &'static str },

    #[error("Hoelder constant is required for k = 0 approximation")]
    MissingHolderConstant,

    #[error("Glaeser inequality violated at t = {t}: c(t) = 0 but c'(t) = {derivative}")]
    GlaeserViolation { t: f64, derivative: f64 },

    #[error("sigma = {sigma} lies outside the decay regime ({lower}, 1/2]")]
    OutsideDecayRegime { sigma: f64, lower: f64 },

    #[error("sigma = {sigma} lies outside the derivative-loss regime [0, {upper})")]
    OutsideLossRegime { sigma: f64, upper: f64 },

    #[error("lambda = {lambda} is below the frequency threshold nu = {nu}")]
    BelowFrequencyThreshold { lambda: f64, nu: f64 },

    #[error("step size underflow at t = {t} (c(t) = {coefficient}, h = {step})")]
    StepSizeUnderflow { t: f64, coefficient: f64, step: f64 },

    #[error("mode {mode}: {source}")]
    Mode {
        mode: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("sequence selection failed at n = {n}: condition {condition} unsatisfiable in the pool")]
    PoolExhausted { n: usize, condition: &'static str },

    #[error("non-finite component at mode {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: operator has {expected} modes, vector has {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("table: {0}")]
    Table(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
