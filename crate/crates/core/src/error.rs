use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid injection: {0}")]
    InvalidInjection(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("end {end} of edge `{edge}` has infinite index")]
    InfiniteIndex { edge: String, end: u8 },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("unclassifiable graph of groups: {0}")]
    Unclassifiable(String),
    #[error("operation requires the free-abelian regime")]
    AbstractRegime,
    #[error("empty point set: {0}")]
    EmptySet(&'static str),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
