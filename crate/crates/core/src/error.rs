use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("shuffle requires at least one part")]
    EmptyShuffle,
    #[error("element does not fit the term: {0}")]
    TypeMismatch(String),
    #[error("palette is empty")]
    EmptyPalette,
    #[error("palette has no sentinel color or no other color")]
    SentinelMissing,
    #[error("palette mismatch: {0}")]
    PaletteMismatch(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("search budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("position {0} is not in the sentinel fiber R")]
    NotInR(String),
    #[error("sequence {0} is not a node of the tree")]
    NotANode(String),
    #[error("sequence {0} is not a leaf of the tree")]
    NotALeaf(String),
    #[error("element has no finite rank within the explored depth")]
    RankNotFinite,
    #[error("address mismatch: {0}")]
    AddressMismatch(String),
    #[error("branch oracle is inconsistent with the computed prefix: {0}")]
    OracleInconsistent(String),
    #[error("unresolved at depth {depth}: {element}")]
    Unresolved { element: String, depth: usize },
    #[error("witness invariant violated: {0}")]
    WitnessViolation(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("orders are not convex-biembeddable: {0}")]
    NotBiembeddable(String),
    #[error("value is not in the image of the embedding")]
    NotInImage,
}

pub type Result<T> = std::result::Result<T, Error>;
