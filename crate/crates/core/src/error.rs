use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid probability {0}: must lie in [0, 1]")]
    InvalidProbability(f64),
    #[error("density {density} infeasible: s*C(n,2) = {wanted} exceeds {allowed} allowed cross-partition pairs")]
    DensityInfeasible {
        density: f64,
        wanted: f64,
        allowed: u64,
    },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("coloring has length {got}, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("randomness must be {expected} bytes, got {got}")]
    BadRandomnessLength { expected: usize, got: usize },
    #[error("index {index} out of range for {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("value {value} does not fit in {width} bits")]
    ValueTooWide { value: u64, width: u32 },
    #[error("field overflow: {0}")]
    Overflow(&'static str),
    #[error("merkle tree needs at least two leaves, got {0}")]
    TooFewLeaves(usize),
    #[error("shared opening needs two distinct leaves, got {0} twice")]
    IdenticalIndices(usize),
    #[error("graph has no edges")]
    EmptyEdgeSet,
    #[error("coloring is not valid for the graph ({conflicts} conflicting edges)")]
    InvalidColoring { conflicts: usize },
    #[error("coloring is valid for the graph; soundness simulation needs at least one conflict")]
    ColoringActuallyValid,
    #[error("edge ({0}, {1}) is not in the graph")]
    EdgeNotInGraph(usize, usize),
    #[error("round state already used for a response")]
    StateReused,
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
    #[error("malformed input at byte {position}: {reason}")]
    Malformed { position: usize, reason: String },
    #[error("iterated logarithm undefined for n={n}, p={p}")]
    Domain { n: f64, p: f64 },
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn malformed(position: usize, reason: impl Into<String>) -> Self {
        Error::Malformed {
            position,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
