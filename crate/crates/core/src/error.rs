use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("node id {id} out of range for a graph with {n} nodes")]
    InvalidNode { id: usize, n: usize },

    #[error("explicit node count {n} is smaller than the largest id + 1 ({needed})")]
    NodeCountTooSmall { n: usize, needed: usize },

    #[error("edge list rejected: {0}")]
    Rejected(String),

    #[error("graph with {n} nodes is too small (need at least 3)")]
    DegenerateGraph { n: usize },

    #[error("statistic undefined: {0}")]
    DegenerateStatistic(String),

    #[error("{what} = {value} outside the valid range {range}")]
    Domain {
        what: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("rho = {rho} outside the invertible range: {boundary}")]
    OutOfRange { rho: f64, boundary: Boundary },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid sample spec: {0}")]
    InvalidSpec(String),

    #[error("label vector has length {got}, graph has {n} nodes")]
    LabelMismatch { got: usize, n: usize },

    #[error("duplicate snapshot tag {0:?}")]
    DuplicateTag(String),

    #[error("no sponsorship records")]
    EmptyRecords,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Which end of the invertible interval an out-of-range value fell off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Value at or below the lower end; the inverse saturates at r = 1 (or m = 1).
    Lower,
    /// Value at or above the upper end; the inverse diverges.
    Unbounded,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Lower => write!(f, "at or below the lower bound (inverse saturates)"),
            Boundary::Unbounded => write!(f, "at or above the supremum (inverse is +inf)"),
        }
    }
}
