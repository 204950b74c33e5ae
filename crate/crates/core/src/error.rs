use thiserror::Error;

/// Errors produced by the library.
///
/// `Refused` is deliberately distinct from a refutation: it means a size guard
/// or search budget stopped the computation before a verdict was reached.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("subgraph is not strongly connected: boundary {gamma:?} is not achievable")]
    NotStronglyConnected { gamma: Vec<u32> },

    #[error("certificate rejected: {0}")]
    Rejected(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
