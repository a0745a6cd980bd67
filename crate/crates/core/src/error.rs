use thiserror::Error;

/// Errors shared by every module in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate neighbor {neighbor} for left node {left} at line {line}")]
    DuplicateNeighbor {
        line: usize,
        left: String,
        neighbor: String,
    },

    #[error("inconsistent right length at line {line}: expected {expected}, got {got} in {node}")]
    InconsistentRightLen {
        line: usize,
        expected: usize,
        got: usize,
        node: String,
    },

    #[error("unknown left node {0}")]
    UnknownLeftNode(String),

    #[error("mismatched left sets: {0}")]
    MismatchedLeftSets(String),

    #[error("bad tags: {0}")]
    BadTags(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("generation failure: {0}")]
    GenerationFailure(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("work budget exceeded after {used} units (limit {limit})")]
    WorkBudgetExceeded { used: u64, limit: u64 },

    #[error("invalid copy count {0}")]
    InvalidCopies(u64),

    #[error("unsupported request class k={k}: matcher serves {supported}")]
    UnsupportedClass { k: u32, supported: String },

    #[error("matcher guarantee breach: in-budget request ({x},{k}) exhausted every level")]
    GuaranteeBreach { x: String, k: u32 },

    #[error(
        "left-universe miss: machine output {output} has length {len}, not covered by the build"
    )]
    LeftUniverseMiss { output: String, len: usize },

    #[error("hash collision across matchers: {hash} already decodes to {existing}")]
    CrossFamilyCollision { hash: String, existing: String },

    #[error("no program of length <= {max_len} produces the target within budget")]
    NotFound { max_len: u32 },

    #[error("list index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("no splitting prime <= {cap} for {x}")]
    NoPrimeFound { cap: u64, x: String },

    #[error("width overflow: {0}")]
    WidthOverflow(String),

    #[error("empty left set")]
    EmptySet,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("illegal move by {player}: {msg}")]
    IllegalMove { player: &'static str, msg: String },
}
