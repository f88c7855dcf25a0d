use thiserror::Error;

/// Errors produced while loading a presentation or running an analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed system document: {0}")]
    Parse(String),

    #[error("invalid bases: {0}")]
    InvalidBases(String),

    #[error("invalid edge {index}: {reason}")]
    InvalidEdge { index: usize, reason: String },

    #[error(
        "right-resolving violation at vertex {vertex}: edges {first} and {second} share label {label:?}"
    )]
    NotRightResolving {
        vertex: usize,
        first: usize,
        second: usize,
        label: Vec<u32>,
    },

    #[error("prefix {prefix:?} does not fit the bases {bases:?}")]
    PrefixOutOfRange { prefix: Vec<u32>, bases: Vec<u32> },

    #[error("the presentation is empty after pruning")]
    EmptySystem,

    #[error("{vertices} vertices exceed the subset-automaton capacity of 64")]
    TooManyVertices { vertices: usize },

    #[error("computation budget exceeded: {0}")]
    Budget(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("adjacency matrix is not primitive")]
    NotPrimitive,

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("no shared positive eigenvector: {0}")]
    NoSharedVector(String),

    #[error("structural mismatch: {0}")]
    StructuralMismatch(String),

    #[error("no bracket found for the root: {0}")]
    BracketNotFound(String),

    #[error("coefficients violate the equation form: {0}")]
    BadCoefficients(String),

    #[error("truncation did not converge by m = {0}")]
    NotConverged(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from a resource budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_) | Error::Overflow(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
