use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("node {node} is out of range 1..={n}")]
    InvalidNode { node: u32, n: u32 },

    #[error("channel ({0}, {1}) touches a hacked node")]
    HackedChannel(u32, u32),

    #[error("nodes {0} and {1} share no common secret bits")]
    NoCommonBits(u32, u32),

    #[error("sampling weight {d} exceeds the {available} common bits of the channel")]
    WeightTooLarge { d: usize, available: usize },

    #[error("channel budget exhausted: {consumed} + {requested} bits exceeds {budget}")]
    BudgetExceeded {
        consumed: u64,
        requested: u64,
        budget: u64,
    },

    #[error("counter {counter} replayed on channel ({i}, {j}), last accepted {last}")]
    Replay {
        i: u32,
        j: u32,
        counter: u64,
        last: u64,
    },

    #[error("quota {quota} does not divide the per-node budget {l}")]
    QuotaNotDivisible { l: u64, quota: u64 },

    #[error("could not build a regular group design after {retries} retries")]
    DesignRetriesExhausted { retries: usize },

    #[error(
        "exact enumeration too large ({detail}); use the relaxed or feasibility checker instead"
    )]
    EnumerationBudget { detail: String },

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
