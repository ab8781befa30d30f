use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum HardgapError {
    #[error("rule number {0} out of range 0..=255")]
    RuleNumberOutOfRange(u32),
    #[error("unknown rule name: {0}")]
    UnknownRule(String),
    #[error("row of length {len} too short for radius {radius}")]
    RowTooShort { len: usize, radius: usize },
    #[error("hidden pattern count {k} out of range for radius {radius}")]
    HiddenCountOutOfRange { k: usize, radius: usize },
    #[error("duplicate pattern {0} in explicit hidden list")]
    DuplicatePattern(usize),
    #[error("pattern index {0} invalid for radius {1}")]
    PatternOutOfRange(usize, usize),
    #[error("initial density {0} must lie in (0, 1)")]
    InvalidDensity(f64),
    #[error("width {width} too small for radius {radius}")]
    WidthTooSmall { width: usize, radius: usize },
    #[error("rule {0} is not linear over GF(2)")]
    NonlinearRule(String),
    #[error("k-NN requires odd k, got {0}")]
    EvenK(usize),
    #[error("k-NN k={k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("weight profile must be nonnegative and nonincreasing")]
    InvalidWeightProfile,
    #[error("completely monotone mixture must contain an atom with c > 0, r > 0")]
    EmptyMixture,
    #[error("kernel base r={0} must lie in (0, 1)")]
    KernelBaseOutOfRange(f64),
    #[error("embedding vectors have mismatched dimensions")]
    EmbeddingDimMismatch,
    #[error("no hidden-pattern occurrences in the test set")]
    EmptyTestSet,
    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("shape mismatch in {op}: {detail}")]
    ShapeMismatch { op: String, detail: String },
    #[error("margin condition M < 2m unachievable: m={m}, M={M} at rho={rho}")]
    MarginFailure { m: f64, M: f64, rho: f64 },
    #[error("deep-circuit invariant violated at block {block}: {detail}")]
    CircuitInvariant { block: usize, detail: String },
    #[error("NaN encountered in gradients during step {0}")]
    NanGradient(usize),
    #[error("NaN loss at epoch {0}; aborting with last good checkpoint")]
    NanLoss(usize),
    #[error("input {0} out of 6-bit range [0, 63]")]
    SymbolicOutOfRange(i64),
    #[error("no consistent substitution found after {0} retries")]
    SubstitutionFailed(usize),
    #[error("requested {requested} examples but pair space has only {available}")]
    PairSpaceExhausted { requested: usize, available: usize },
    #[error("unknown analysis level or site: {0}")]
    UnknownSite(String),
    #[error("degenerate probe target: only one class present")]
    DegenerateTarget,
    #[error("checkpoint format error: {0}")]
    Checkpoint(String),
    #[error("dataset container error: {0}")]
    Container(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HardgapError>;
