use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: environments need at least 2 axes")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("configuration {0:?} is not collision free")]
    InvalidState(Vec<f64>),

    #[error("obstacle box {0} is malformed or leaves the unit hypercube")]
    InvalidObstacle(usize),

    #[error("sampling failed after {0} attempts")]
    SamplingFailed(usize),

    #[error("informed set has coincident foci")]
    DegenerateFoci,

    #[error("unknown node id {0}")]
    UnknownNode(usize),

    #[error("no active terminal edges to sample from")]
    NoActiveEdges,

    #[error("terminal tree is empty or does not span all terminals")]
    TreeNotSpanning,

    #[error("instance has {0} terminals, at most {1} are supported")]
    TooManyTerminals(usize, usize),

    #[error("need at least two terminals, got {0}")]
    TooFewTerminals(usize),

    #[error("terminals {0} and {1} coincide")]
    DuplicateTerminal(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("only two-dimensional scenes can be rendered (got {0})")]
    UnsupportedDimension(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
