use thiserror::Error;

/// Errors produced by the simulator and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("item index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weight {index} is not finite")]
    NonFiniteWeight { index: usize },

    #[error("weights have zero total mass")]
    ZeroTotalWeight,

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("oracle marks no good items")]
    NoGoodItems,

    #[error("probability {0} is outside (0, 1]")]
    InvalidProbability(f64),

    #[error("good probability is zero: retrieval never terminates")]
    InfiniteRetrievalTime,

    #[error("register dimension must be at least 1")]
    EmptyRegister,

    #[error("requested dimension {requested} exceeds cap {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("lexicon line {line}: duplicate word {word:?}")]
    DuplicateWord { line: usize, word: String },

    #[error("lexicon line {line}: malformed frequency {value:?}")]
    MalformedFrequency { line: usize, value: String },

    #[error("lexicon line {line}: negative frequency {value}")]
    NegativeFrequency { line: usize, value: f64 },

    #[error("lexicon line {line}: mixes entries with and without frequencies")]
    MixedFormat { line: usize },

    #[error("lexicon line {line}: empty word")]
    EmptyWord { line: usize },

    #[error("lexicon contains no words")]
    EmptyLexicon,

    #[error("lexicon is not valid UTF-8 text: {0}")]
    Io(String),

    #[error("partition {0:?} has no good items")]
    EmptyPartition(String),

    #[error("every comparison is tied: no signal")]
    NoSignal,
}

impl Error {
    /// True for errors caused by a configured size limit rather than bad input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
