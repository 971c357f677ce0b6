use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex count {0} outside the supported range 1..=16")]
    Capacity(usize),
    #[error("no card of K1")]
    NoCardOfK1,
    #[error("vertex {v} out of range for a graph on {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("malformed graph: {0}")]
    Malformed(String),
    #[error("operation requires a directed graph")]
    NotDirected,
    #[error("class {class} does not match a {kind} operation")]
    ClassMismatch { class: String, kind: &'static str },
    #[error("batch mixes orders {0} and {1}")]
    MixedOrders(usize, usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("fixture {name} failed: {detail}")]
    FixtureFailed { name: String, detail: String },
    #[error("parent batch of {size} children exceeds the configured limit of {limit}")]
    BatchLimit { size: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
