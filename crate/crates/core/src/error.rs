use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {0} has no incident edge (isolated vertex)")]
    IsolatedVertex(u64),

    #[error("edge ({u}, {v}) has negative or non-finite weight {weight}")]
    InvalidWeight { u: u64, v: u64, weight: f64 },

    #[error("edge ({u}, {v}) listed with conflicting weights {first} and {second}")]
    ConflictingEdge { u: u64, v: u64, first: f64, second: f64 },

    #[error("self-loop at vertex {0} but loops are not allowed")]
    SelfLoop(u64),

    #[error("vertex id {id} out of range for a graph on {n} vertices")]
    VertexOutOfRange { id: usize, n: usize },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("eigensolver failed to converge: {0}")]
    NumericalFailure(String),

    #[error("common refinement of {m} and {n} cells needs {cells} cells, above the cap of {cap}")]
    RefinementTooLarge {
        m: usize,
        n: usize,
        cells: usize,
        cap: usize,
    },

    #[error("exact enumeration over {size} cells exceeds the limit of {limit}; use sampled mode")]
    ExactModeTooLarge { size: usize, limit: usize },

    #[error("vertex counts differ: {left} vs {right}")]
    VertexCountMismatch { left: usize, right: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid degree split: {0}")]
    InvalidSplit(String),

    #[error("part {0} of the degree split has zero volume")]
    DegeneratePart(usize),

    #[error("graph is not connected ({components} components)")]
    NotConnected { components: usize },

    #[error(
        "second eigenvalue {rho1} is not above the gap threshold {gap_min}; \
         the graph is rank-1 (quasirandom) or has a non-positive second eigenvalue"
    )]
    SpectralGapTooSmall { rho1: f64, gap_min: f64 },

    #[error("second eigenvalue {rho1} is within {gap_min} of 1; the graph is nearly disconnected")]
    NearlyDisconnected { rho1: f64, gap_min: f64 },

    #[error(
        "most negative eigenvalue {rho_min} dominates rho1 = {rho1}; a union of positive \
         quasirandom parts cannot represent a dominant negative eigenvalue"
    )]
    NegativeSpectrum { rho1: f64, rho_min: f64 },

    #[error("balance condition not bracketed on (0, 1)")]
    BalanceNotBracketed,

    #[error("edge probability {max_probability} exceeds 1")]
    ProbabilityOverflow { max_probability: f64 },

    #[error("isolated vertices remained after {retries} resampling attempts")]
    IsolationRetryExhausted { retries: usize },

    #[error("{family} needs at least {min}, got {got}")]
    SizeTooSmall {
        family: &'static str,
        min: usize,
        got: usize,
    },

    #[error("a convergence run needs at least two sizes")]
    NeedTwoSizes,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NumericalFailure(_) | Error::BalanceNotBracketed => 3,
            Error::RefinementTooLarge { .. }
            | Error::ExactModeTooLarge { .. }
            | Error::NotConnected { .. }
            | Error::SpectralGapTooSmall { .. }
            | Error::NearlyDisconnected { .. }
            | Error::NegativeSpectrum { .. }
            | Error::DegeneratePart(_)
            | Error::IsolationRetryExhausted { .. } => 4,
            _ => 2,
        }
    }
}
