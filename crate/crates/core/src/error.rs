use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("branching factor k = 1 never stabilizes; k must be at least 2")]
    UnitBranching,
    #[error("branching factor k = {0} is not supported")]
    InvalidBranching(u32),
    #[error("tree with k = {k}, ell = {ell} is too large to materialize")]
    TooLarge { k: u32, ell: u32 },
    #[error("vertex v{index} is outside the tree (1..={max})")]
    VertexOutOfRange { index: usize, max: usize },
    #[error("child index {j} out of range 1..={k}")]
    ChildOutOfRange { j: u32, k: u32 },
    #[error("vertex v{0} lies on the truncation layer and cannot fire")]
    TruncationLayer(usize),
    #[error("chip {chip} is not a valid label (1..={max})")]
    ChipOutOfRange { chip: u32, max: u32 },
    #[error("chip {0} appears more than once")]
    DuplicateChip(u32),
    #[error("chip {0} is missing from the configuration")]
    MissingChip(u32),
    #[error("chip {chip} is not present at vertex v{vertex}")]
    ChipAbsent { chip: u32, vertex: usize },
    #[error("firing tuple must hold exactly {expected} strictly increasing chips, got {got:?}")]
    BadTuple { expected: u32, got: Vec<u32> },
    #[error("stabilization requires the initial configuration")]
    NotInitial,
    #[error("strategy `{name}` produced an invalid plan at v{vertex}: {reason}")]
    InvalidPlan {
        name: String,
        vertex: usize,
        reason: String,
    },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("compose depth {levels} exceeds tree depth {ell}")]
    ComposeTooDeep { levels: u32, ell: u32 },
    #[error("not a permutation of 1..={0}")]
    NotPermutation(usize),
    #[error("sequence contains duplicate value {0}")]
    DuplicateValue(u64),
    #[error("pattern of length {0} exceeds the supported limit of {limit}", limit = crate::combinatorics::MAX_PATTERN_LEN)]
    PatternTooLong(usize),
    #[error("pattern of length {pattern} is longer than the text of length {text}")]
    PatternLongerThanText { pattern: usize, text: usize },
    #[error("value {value} is outside 0..{bound}")]
    ValueOutOfRange { value: u64, bound: u64 },
    #[error("palindromic_extend precondition failed: {0}")]
    PalindromicPrecondition(&'static str),
    #[error("ballot property violated at step {0}")]
    BallotViolation(usize),
    #[error("invalid dispersion: {0}")]
    InvalidDispersion(String),
    #[error("ell = 0 is outside the domain of this closed form")]
    ZeroDepth,
    #[error("length {len} is not a power of k = {k}")]
    NotPowerOfK { len: usize, k: u32 },
    #[error("pattern embedding needs ell = 2n = {expected}, got ell = {got}")]
    EmbeddingDepth { expected: u32, got: u32 },
    #[error("enumeration of about {estimate} configurations exceeds the cap of {cap}; pass force to override")]
    SizeGuard { estimate: String, cap: u64 },
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
    #[error("arithmetic overflow computing {0}")]
    Overflow(&'static str),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("malformed compose spec at line {line}: {reason}")]
    ComposeSpec { line: usize, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
}
