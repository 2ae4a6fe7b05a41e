use thiserror::Error;

/// Errors produced by the multiplication pipeline and its building blocks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector length must be positive")]
    ZeroLength,

    #[error("index {index} out of range for length {length}")]
    IndexOutOfRange { index: u64, length: u64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: u64, right: u64 },

    #[error("envelope exceeded: {0}")]
    Envelope(String),

    #[error("coefficient overflow at index {0}")]
    Overflow(u64),

    #[error("floating-point error bound {bound:.3e} exceeds tolerance {tolerance}")]
    Precision { bound: f64, tolerance: f64 },

    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("sieve limit {0} is below 2")]
    SieveLimit(u64),

    #[error("prime pool is empty")]
    EmptyPool,

    #[error("invalid prime range [{lo}, {hi}]: need hi >= 2*lo >= 4")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("no prime found in [{lo}, {hi}] after {draws} draws")]
    PrimeSearchExhausted { lo: u64, hi: u64, draws: u64 },

    #[error("root-of-unity exponent {exponent} out of range [0, {bound})")]
    ExponentOutOfRange { exponent: u64, bound: u64 },

    #[error("supports wrap around length {length}: max index sum {sum}")]
    WrapAround { sum: u64, length: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no verified product after {rounds} outer rounds")]
    RoundsExhausted { rounds: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
