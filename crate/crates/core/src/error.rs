use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("symbolic-size: a segment size is not concrete")]
    SymbolicSize,
    #[error("split point {k} out of range for segment of size {n}")]
    SplitOutOfRange { k: u64, n: u64 },
    #[error("constant and variable belong to different root domains")]
    RootMismatch,
    #[error("cannot recurse on an empty segment")]
    EmptySegment,
    #[error("grounding-too-large: {atoms} ground atoms exceed the limit of {limit}")]
    GroundingTooLarge { atoms: u64, limit: u64 },
    #[error("node budget of {0} exhausted")]
    BudgetExceeded(u64),
    #[error("deadline exceeded")]
    Timeout,
    #[error("oracle limit exceeded: {atoms} ground atoms, limit {limit}")]
    OracleLimit { atoms: u64, limit: u64 },
    #[error("unsupported existential: {0}")]
    UnsupportedExistential(String),
    #[error("formula too large for CNF expansion: {size} literals, limit {limit}")]
    FormulaTooLarge { size: usize, limit: usize },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
