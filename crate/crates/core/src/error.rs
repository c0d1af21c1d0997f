use thiserror::Error;

/// Errors raised by graph construction, evaluation and certification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("loop edge at node {0}: multigraphs cannot carry loops")]
    LoopEdge(usize),
    #[error("node {node} out of range for a graph with {nodes} nodes")]
    NodeOutOfRange { node: usize, nodes: usize },
    #[error("label count {labels} exceeds node count {nodes}")]
    TooManyLabels { labels: usize, nodes: usize },
    #[error("label counts differ: {left} vs {right}")]
    LabelMismatch { left: usize, right: usize },
    #[error("graph is not simple")]
    NotSimple,
    #[error("{what} = {value} exceeds the guard {limit}")]
    GuardExceeded { what: &'static str, value: u128, limit: u128 },
    #[error("invalid graph family: {0}")]
    InvalidFamily(String),
    #[error("total node weight is zero")]
    ZeroTotalWeight,
    #[error("target is not normalized")]
    NotNormalized,
    #[error("invalid node weight: {0}")]
    InvalidNodeWeight(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("matrix is not symmetric")]
    Asymmetric,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite kernel value at ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("value {value} exceeds the bound {bound}")]
    BoundExceeded { value: String, bound: String },
    #[error("Hankel rank {rank} exceeds the atom limit {max}")]
    RankExceeds { rank: usize, max: usize },
    #[error("characteristic polynomial has non-real or repeated roots")]
    NonrealRoots,
    #[error("moment prefix is not consistent with a finite-support measure: {0}")]
    Inconsistent(String),
    #[error("step partitions are incompatible: {0}")]
    IncompatiblePartitions(String),
    #[error("cycle length {0} is below 2")]
    CycleTooShort(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
