//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The neighbor oracle reported `v` as a neighbor of `u` but not the converse.
    #[error("asymmetric adjacency: {0} lists {1} as neighbor but not conversely")]
    AsymmetricAdjacency(String, String),

    #[error("point {0} does not belong to the space")]
    UnknownPoint(String),

    #[error("distance between {0} and {1} is infinite; operation requires finite distances")]
    InfiniteDistance(String, String),

    #[error("operation requires a non-empty space")]
    EmptySpace,

    #[error("point {0} carries no collar coordinates")]
    MissingCollarData(String),

    /// A prefix fails the escape certificate: the gauge stagnates at or below
    /// the witnessed radius over the tail of the prefix.
    #[error("not a simple end: gauge stagnates at radius {radius}")]
    NotASimpleEnd { radius: f64 },

    #[error("ray generator undefined at index {index}")]
    ExtensionUndefined { index: usize },

    #[error("rays live on different carriers ({0} vs {1})")]
    CarrierMismatch(String, String),

    #[error("budget has an empty tolerance schedule")]
    EmptySchedule,

    #[error("level {0} is not in the tree's radius schedule")]
    UnknownLevel(u64),

    #[error("medium end has an empty block at position {0}")]
    EmptyBlock(usize),

    #[error("pair {0} was not verified equivalent at the working budget")]
    PairNotEquivalent(usize),

    #[error("field {tag} produced {value} outside [0,1] at {point}")]
    FieldOutOfRange {
        tag: String,
        point: String,
        value: f64,
    },

    #[error("component {0} does not exist at level {1}")]
    UnknownComponent(String, u64),

    #[error("no net with Hausdorff distance below 1/{needed} is available")]
    NetResolution { needed: u64 },

    #[error("sampler found no interior point within {radius} of boundary point {point}")]
    NetCoverage { point: String, radius: f64 },

    #[error("family is not a cover: point {0} is uncovered")]
    NotACover(String),

    #[error("multiplicity {found} exceeds {limit} at point {point}")]
    MultiplicityExceeded {
        point: String,
        found: usize,
        limit: usize,
    },

    #[error("discretization exhausted at construction step {step}: {detail}")]
    DepthExhausted { step: usize, detail: String },

    #[error("cover mesh does not shrink with depth: element {element} has diameter {diameter}")]
    MeshNotShrinking { element: usize, diameter: f64 },

    #[error("grid cannot host every (function, bound) combination: {0}")]
    GridTooSmall(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed spec file: {0}")]
    Spec(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
