use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph spec: {0}")]
    InvalidSpec(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("support mismatch: weights cover {weights:?}, vector covers {vector:?}")]
    SupportMismatch { weights: Vec<i32>, vector: Vec<i32> },

    #[error("vertex set must be nonempty")]
    EmptySet,

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("enumeration budget exhausted after {0} sets")]
    BudgetExhausted(u64),

    #[error("no strongly connected set with diameter at most {0}")]
    EmptyFamily(u32),

    #[error("diameter bound {0} exceeds the 63 supported by the bitmask oracle")]
    DiameterTooLarge(u32),

    #[error("window width {0} exceeds the 62 supported by the frontier solver")]
    WindowTooWide(usize),

    #[error("scaled integer weights overflow; use the float mode for these weights")]
    Overflow,

    #[error("invalid step {from} -> {to}: offset is not an edge of the graph")]
    InvalidStep { from: i64, to: i64 },

    #[error("invalid trap set: {0}")]
    InvalidTrap(String),

    #[error("invalid formula: {0}")]
    InvalidFormula(String),

    #[error("unknown format {0:?}")]
    UnknownFormat(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
