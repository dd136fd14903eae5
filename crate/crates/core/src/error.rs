use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vertex {vertex} out of range (graph has {n} vertices)")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("boundary condition occupies adjacent vertices {0} and {1}")]
    BoundaryNotIndependent(usize, usize),

    #[error("vertex {0} is pinned by the boundary condition and cannot be the root")]
    RootPinned(usize),

    #[error("tree was built in {found} mode, evaluator needs {expected}")]
    ModeMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("node budget of {budget} exceeded after expanding {expanded} nodes")]
    BudgetExceeded { budget: u64, expanded: u64 },

    #[error("budget exhausted before tolerance was reached; best interval [{lo}, {hi}] at depth {depth}")]
    Unconverged {
        lo: f64,
        hi: f64,
        depth: usize,
        nodes: u64,
    },

    #[error("graph too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("state space exceeded cap of {cap} states")]
    StateCap { cap: usize },

    #[error("infeasible program: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
