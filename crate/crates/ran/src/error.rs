use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex label {label} out of range 1..={n}")]
    VertexOutOfRange { label: u32, n: u32 },

    #[error("k = {k} exceeds vertex count n = {n}")]
    KTooLarge { k: usize, n: usize },

    #[error("graph too small for this operation: requires t >= {required}, got t = {t}")]
    GraphTooSmall { t: u64, required: u64 },

    #[error("graph too large for exact computation: n = {n} exceeds cap {cap}; use the estimate variant")]
    GraphTooLargeForExact { n: usize, cap: usize },

    #[error("generation of t = {t} steps needs about {required} bytes, over the {limit}-byte memory budget")]
    MemoryBudget { t: u64, required: u64, limit: u64 },

    #[error("t_max = {t_max} exceeds the supported maximum {max}")]
    StepLimit { t_max: u64, max: u64 },

    #[error("degenerate degree histogram: need at least 2 distinct degrees >= {d_min}")]
    DegenerateHistogram { d_min: u32 },

    #[error("rising factorial {a}^({k}) overflows u64")]
    Overflow { a: u64, k: u32 },

    #[error("enumeration supports t <= {cap}, got t = {t}")]
    EnumerationTooLarge { t: u64, cap: u64 },

    #[error("i/o failure while {context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("snapshot format error: {0}")]
    Snapshot(String),
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { context: context.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
