use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("element {element} lies outside [1, {n}]")]
    OutOfRange { element: usize, n: usize },

    #[error("interval length mismatch: set has N = {set}, context has N = {context}")]
    LengthMismatch { set: usize, context: usize },

    #[error("p = {p} is not an odd prime in (2N, 4N) for N = {n}")]
    InvalidModulus { p: usize, n: usize },

    #[error("no prime found in ({lo}, {hi}); the primality scan is broken")]
    PrimeScanExhausted { lo: usize, hi: usize },

    #[error("imaginary part {0:e} of the spectral progression sum exceeds tolerance")]
    ImaginaryResidue(f64),

    #[error("N = {n} exceeds the exact-search limit {limit}; use a cached table or a construction")]
    SearchLimit { n: usize, limit: usize },

    #[error("degenerate construction: {0}")]
    Degenerate(String),

    #[error("dilation scan exhausted for |R| = {size} over p = {p}")]
    DilationExhausted { p: usize, size: usize },

    #[error("wraparound: N + 2x = {reach} is not below p = {p}")]
    Wraparound { reach: usize, p: usize },

    #[error("input set contains a three-term progression")]
    NotProgressionFree,

    #[error("corrupt r3 cache: {0}")]
    CorruptCache(String),

    #[error("unsupported r3 cache version {found} (expected {expected})")]
    CacheVersion { found: u32, expected: u32 },

    #[error("cached r3({n}) = {cached} but recomputation gives {computed}")]
    CacheMismatch { n: usize, cached: usize, computed: usize },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// A computation that ran to completion but where at least one named check
/// came out false. The full report is attached so callers can still emit it.
#[derive(Debug, Error)]
pub enum VerificationError<R> {
    #[error(transparent)]
    Setup(#[from] Error),

    #[error("verification failed: {}", failed.join(", "))]
    Failed { failed: Vec<String>, report: Box<R> },
}
