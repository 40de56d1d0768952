use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("m must be at least 1")]
    ZeroM,

    /// An exact integer quantity does not fit the working width.
    #[error("integer overflow computing {what}: needs at least {required_bits} bits")]
    Overflow { what: &'static str, required_bits: u32 },

    #[error("extension degree {0} outside the supported range 1..=24")]
    DegreeOutOfRange(u32),

    #[error("field mismatch: operands live in GF(2^{left}) and GF(2^{right})")]
    FieldMismatch { left: u32, right: u32 },

    #[error("brute-force point count over GF(2^{bits}) exceeds the 2^24 element bound")]
    FieldTooLarge { bits: u32 },

    #[error("k must be at least 1")]
    ZeroK,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The plane polynomial is not in the span of the embedded basis.
    #[error("not a regular form: {0}")]
    NotRegular(String),

    /// A consistency property of the curve failed; indicates a bug upstream.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("inconsistent rank profile: {0}")]
    InconsistentProfile(String),

    #[error("final-type enumeration exceeds cap {cap} ({free_gaps} free gaps)")]
    CapExceeded { cap: usize, free_gaps: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
