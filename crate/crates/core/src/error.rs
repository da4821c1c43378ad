use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HgError {
    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("instance too large for enumeration: {what} = {got} exceeds {limit}")]
    SizeGuard {
        what: &'static str,
        got: u128,
        limit: u128,
    },
    #[error("hypergraph is disconnected")]
    Disconnected,
    #[error("zero vector")]
    ZeroVector,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, HgError>;
