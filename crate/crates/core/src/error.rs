use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("unknown {kind} `{id}`")]
    Lookup { kind: &'static str, id: String },
    #[error("composition error: {0}")]
    Composition(String),
    #[error("not a subgraph: {0}")]
    NotSubgraph(String),
    #[error("label rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("ill-typed expression: {0}")]
    IllTyped(String),
    #[error("unassigned generator {0}")]
    Unassigned(String),
    #[error("assignment mismatch: {0}")]
    Assignment(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("out of bound: {0}")]
    OutOfBound(String),
    #[error("{0}")]
    Usage(String),
}
