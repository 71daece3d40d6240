use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("qubit count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("at most {max} qubits supported, got {n}")]
    TooManyQubits { n: usize, max: usize },
    #[error("support of size {size} exceeds the limit of {max}")]
    SupportTooLarge { size: usize, max: usize },
    #[error("qubit {0} listed twice")]
    DuplicateQubit(usize),
    #[error("cannot parse Pauli string {0:?}")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("nonpositive weight on edge ({0}, {1})")]
    NonPositiveWeight(usize, usize),
    #[error("non-finite weight on edge ({0}, {1})")]
    NonFiniteWeight(usize, usize),
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Graph(#[from] GraphError),
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("malformed header: {0}")]
    Header(String),
    #[error("header declares {declared} edges, found {found}")]
    EdgeCount { declared: usize, found: usize },
    #[error("input is not valid UTF-8")]
    Encoding,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{n} qubits exceeds the dense oracle cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("state over {state} qubits does not match Hamiltonian over {hamiltonian}")]
    DimensionMismatch { state: usize, hamiltonian: usize },
    #[error("eigenpair residual {residual:e} exceeds bound {bound:e}")]
    Residual { residual: f64, bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SdpError {
    #[error(
        "no convergence after {iterations} iterations \
         (primal {primal_residual:e}, dual {dual_residual:e}, gap {gap:e})"
    )]
    NonConvergence {
        iterations: usize,
        primal_residual: f64,
        dual_residual: f64,
        gap: f64,
    },
    #[error("graph has {graph} vertices but the moment structure has {structure}")]
    DimensionMismatch { graph: usize, structure: usize },
    #[error("expected {expected} class values, got {found}")]
    ValueCount { expected: usize, found: usize },
    #[error("tolerance must be positive")]
    InvalidTolerance,
    #[error("unsupported relaxation level {0}")]
    InvalidLevel(u8),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoundingError {
    #[error("argument {0} outside [-1, 1]")]
    Domain(f64),
    #[error("state over {state} vertices does not match graph over {graph}")]
    DimensionMismatch { state: usize, graph: usize },
    #[error("Bloch vector of vertex {0} is not a unit vector")]
    NotUnit(usize),
    #[error("at least one rounding trial is required")]
    NoTrials,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchingError {
    #[error("odd-set size bound must be odd, got {0}")]
    EvenOddSetBound(usize),
    #[error("fractional matching has {x} entries but graph has {edges} edges")]
    DimensionMismatch { x: usize, edges: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("edges {0} and {1} share a vertex")]
    Conflict(usize, usize),
    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("SDP solution fails the monogamy audit: {0}")]
    Audit(String),
}

/// Umbrella error for the end-to-end pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}
