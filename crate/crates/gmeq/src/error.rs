use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({u}, {v}) out of range for {n} vertices")]
    EdgeOutOfRange { u: usize, v: usize, n: usize },

    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },

    #[error("adjacency matrix must be square and symmetric with 0/1 entries: {0}")]
    InvalidAdjacency(String),

    #[error("edge-list parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("unknown corpus graph {0:?}")]
    UnknownCorpusName(String),

    #[error("edge probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("matrix is not symmetric (max asymmetry {max_asym:.3e})")]
    NotSymmetric { max_asym: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("Jacobi iteration did not converge (off-diagonal residual {residual:.3e})")]
    NoConvergence { residual: f64 },

    #[error("spectrum has repeated eigenvalues; the diagonal parametrization requires a simple spectrum")]
    RepeatedSpectrum,

    #[error("point is outside the feasible polytope (min entry {min_entry:.3e})")]
    InfeasiblePoint { min_entry: f64 },

    #[error("problem size {n} exceeds cap {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("matrix fails the doubly-stochastic check (max deviation {deviation:.3e} > {delta:.3e})")]
    NotDoublyStochastic { deviation: f64, delta: f64 },

    #[error("internal defect: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
