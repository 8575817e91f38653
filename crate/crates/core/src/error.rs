use thiserror::Error;

/// Errors raised by the embedding pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid simplex {0:?}: repeated vertex index")]
    InvalidSimplex(Vec<usize>),
    #[error("empty input")]
    EmptyInput,
    #[error("vertex {vertex} out of range (complex has {count} vertices)")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("boundary of a zero-dimensional simplex")]
    ZeroDimensional,
    #[error("operation requires a graph (dimension 1), got dimension {0}")]
    NotAGraph(usize),

    #[error("axis {axis} out of range for ambient dimension {n}")]
    AxisOutOfRange { axis: usize, n: usize },
    #[error("piece does not lie in the hyperplane x_{axis} = {value}")]
    PieceNotInHyperplane { axis: usize, value: i32 },
    #[error("cone apex is not a point of the base piece")]
    ApexNotOnPiece,
    #[error("piece has dimension {piece}, query expects dimension {expected}")]
    DimensionMismatch { piece: usize, expected: usize },
    #[error("ambient dimension {0} exceeds the supported maximum")]
    AmbientTooLarge(usize),
    #[error("malformed piece: {0}")]
    MalformedPiece(String),

    #[error("no finite box places unboundedly many vertices when m = n")]
    MEqualsN,
    #[error("placement exhausted after {placed} vertices: counting precondition violated")]
    PlacementExhausted { placed: usize },
    #[error("invalid placement configuration: {0}")]
    InvalidConfig(String),

    #[error("base case holds {found} simplices, limit is {limit}")]
    SizePreconditionViolated { found: usize, limit: usize },
    #[error("label range {range} exhausted at simplex {simplex}")]
    LabelRangeExhausted { range: u32, simplex: usize },
    #[error("label class {label} is not (m-1)-sparse after projection")]
    SparsityViolated { label: u32 },
    #[error("recursion reached a level without a base case")]
    RecursionBaseMissing,

    #[error("unsatisfiable parameters: d={d}, m={m}, n={n}")]
    UnsatisfiableParameters { d: usize, m: usize, n: usize },
    #[error("retry budget exhausted after {attempts} attempts")]
    RetryBudgetExhausted { attempts: u32 },

    #[error("heights are not injective on vertices")]
    DegenerateHeights,
    #[error("height function is missing vertex {0}")]
    MissingHeight(usize),
    #[error("chunk of {size} vertices exceeds the cube capacity {capacity}")]
    ChunkTooLarge { size: usize, capacity: usize },

    #[error("bounding box side {side} exceeds the brute-force limit {limit}")]
    BoxTooLarge { side: i64, limit: i64 },

    #[error("parse error: {0}")]
    Parse(String),
    #[error("need at least {needed} sizes for a fit, got {got}")]
    InsufficientFitPoints { needed: usize, got: usize },
    #[error("unsupported dimension for export: {0}")]
    UnsupportedDimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
