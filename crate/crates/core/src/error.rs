use thiserror::Error;

/// Errors produced by the analysis, oracle, simulator and codec layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arrival phase {n} is outside 1..={c_l}")]
    InvalidPhase { n: u64, c_l: u64 },

    /// gcd(C_L, W+S) leaves at least one arrival phase that never meets a wake slot.
    #[error("schedule is not finite: gcd(C_L={c_l}, W+S={period}) = {gcd}")]
    NotFinite { c_l: u64, period: u64, gcd: u64 },

    #[error("degenerate configuration: C_L={c_l} must exceed S={s}")]
    DegenerateConfig { c_l: u64, s: u64 },

    #[error("closed-form analysis requires W = 1, got W = {0}")]
    UnsupportedWake(u64),

    #[error("horizon {given} is below the safe bound {required}")]
    InsufficientHorizon { given: u64, required: u64 },

    #[error("slot arithmetic overflowed")]
    Overflow,

    #[error("empty input")]
    EmptyInput,

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("frame must be {expected} bytes, got {got}")]
    BadLength { expected: usize, got: usize },

    #[error("checksum mismatch: stored {stored:#04x}, computed {computed:#04x}")]
    ChecksumMismatch { stored: u8, computed: u8 },

    #[error("field `{field}` out of range: {value}")]
    FieldOutOfRange { field: &'static str, value: String },

    #[error("dataset: {0}")]
    Dataset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
