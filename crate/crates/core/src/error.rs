use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {arg} is within the error tolerance of a pole of {function}")]
    PoleProximity { function: &'static str, arg: String },

    #[error("precision exhausted in {0}")]
    PrecisionExhausted(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("divergent tail: {0}")]
    DivergentTail(String),

    #[error("factorization has a zero at the origin (m = {0})")]
    ZeroAtOrigin(u32),

    #[error("constant term of the series is not certified nonzero")]
    ZeroConstantTerm,

    #[error("length error: {0}")]
    Length(String),

    #[error("point {point} lies outside the strip ({lo}, {hi})")]
    StripViolation { point: String, lo: String, hi: String },

    #[error("no decay envelope available for {0}")]
    EnvelopeMissing(String),

    #[error("target error {target} unreachable (best estimate {best})")]
    TargetUnreachable { target: String, best: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("root count undecidable at the working precision")]
    Undecidable,

    #[error("insufficient moments: need {needed}, have {have}")]
    InsufficientMoments { needed: usize, have: usize },

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("unknown subject {0:?}")]
    UnknownSubject(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
