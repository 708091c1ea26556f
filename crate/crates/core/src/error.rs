use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a supported prime (need a prime <= 251)")]
    InvalidPrime(u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("chain complex is not a complex: d_{degree} . d_{next} != 0", next = degree + 1)]
    NotAComplex { degree: usize },
    #[error("cannot parse group {input:?}: {reason}")]
    GroupParse { input: String, reason: String },
    #[error("group must be finite for this operation: {0}")]
    InfiniteGroup(String),
    #[error("hom set {0} is infinite; free generators need a mod reduction")]
    InfiniteHom(String),
    #[error("object {0} lies outside the skeleton")]
    OutsideSkeleton(String),
    #[error("truncation guard exceeded: {0}")]
    Guard(String),
    #[error("evaluation too large: {0}")]
    TooLarge(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
