/// Errors shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("invalid defining relation: {0}")]
    InvalidRelation(String),
    #[error("invalid level permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no catalog entry for {runs} runs, {factors} factors, kind {kind}")]
    UnknownCatalogEntry {
        runs: usize,
        factors: usize,
        kind: String,
    },
    #[error("search too large: {0}")]
    CapExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
