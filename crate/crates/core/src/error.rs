use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported EDGE_WEIGHT_TYPE `{0}`")]
    UnsupportedWeightType(String),

    #[error("unsupported EDGE_WEIGHT_FORMAT `{0}`")]
    UnsupportedWeightFormat(String),

    #[error("unsupported problem TYPE `{0}`")]
    UnsupportedProblemType(String),

    #[error("DIMENSION is {expected} but {found} entries were given")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("instance needs at least 4 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("distance d({u},{v}) = {d} is not positive")]
    NonPositiveDistance { u: usize, v: usize, d: f64 },

    #[error("distance matrix is not symmetric at ({u},{v})")]
    Asymmetric { u: usize, v: usize },

    #[error("distance of vertex {0} to itself is undefined")]
    SelfDistance(usize),

    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("perturbation magnitude must be positive and finite, got {0}")]
    InvalidMagnitude(f64),

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("tour has {found} vertices but the instance has {expected}")]
    TourMismatch { expected: usize, found: usize },

    #[error("invalid subset selection: {0}")]
    InvalidSelection(String),

    #[error("endpoint {0} is not in the selection")]
    EndpointNotInSelection(usize),

    #[error("path endpoints must differ, got {0} twice")]
    EqualEndpoints(usize),

    #[error("subset size {size} exceeds the exact-solve cap {cap} (raise it with --cap)")]
    CapExceeded { size: usize, cap: usize },

    #[error("brute-force oracle handles at most {cap} vertices, got {size}")]
    OracleCapExceeded { size: usize, cap: usize },

    #[error("pairing sums of K4 {0:?} are tied")]
    TiedPairings([usize; 4]),

    #[error("expected {expected} optimal paths, got {found}")]
    WrongPathCount { expected: usize, found: usize },

    #[error("{0}")]
    OutOfRange(String),

    #[error("no i <= {n} satisfies the i_d inequality")]
    NoSolution { n: usize },

    #[error("a reference tour is required for this rule")]
    MissingTour,

    #[error("survivor graph is not Hamiltonian; vertices with degree < 2: {low_degree:?}")]
    NotHamiltonian { low_degree: Vec<usize> },

    #[error("exact solve on {size} vertices exceeds the budget cap {cap}")]
    BudgetExceeded { size: usize, cap: usize },
}
