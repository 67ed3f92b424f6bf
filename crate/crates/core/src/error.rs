use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet mismatch: expected {expected}, found {found}")]
    AlphabetMismatch { expected: String, found: String },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),

    #[error("empty anchor word")]
    EmptyWord,

    #[error("factor length {n} exceeds word length {len}")]
    FactorTooLong { n: usize, len: usize },

    #[error("letter `{0}` has an empty image")]
    EmptyImage(String),

    #[error("morphism is not an endomorphism")]
    NotEndomorphism,

    #[error("no letter begins its own image within the first {0} powers")]
    NoSeed(usize),

    #[error("substitution is not primitive")]
    NotPrimitive,

    #[error("substitution is not proper")]
    NotProper,

    #[error("substitution does not grow (every image has length 1)")]
    NoGrowth,

    #[error("anchor `{0}` occurs fewer than twice in the scanned prefix")]
    AnchorNotRecurrent(String),

    #[error("anchor `{anchor}` is not a prefix of the scanned word")]
    AnchorNotPrefix { anchor: String },

    #[error("cannot decompose `{word}` over the known return words to `{anchor}`")]
    Decomposition { word: String, anchor: String },

    #[error("certificate check failed: {0}")]
    Certificate(String),

    #[error("prefix of length {have} is too short; need at least {need}")]
    PrefixTooShort { have: usize, need: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("restricted characteristic polynomial has a non-integral coefficient {0}")]
    NonIntegral(String),

    #[error("properization failed: {0}")]
    Properization(String),

    #[error("directive too short: generated {have} letters, need {need}")]
    DirectiveTooShort { have: usize, need: usize },

    #[error("invalid continued fraction: {0}")]
    InvalidContinuedFraction(String),

    #[error("continued fraction too coarse: convergent denominator {have} must exceed {need}")]
    InsufficientPrecision { have: String, need: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
