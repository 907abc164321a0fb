use alloc::string::String;

/// Errors raised by form algebra, geometry construction and the pairings.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("forms live on different grids")]
    GridMismatch,
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("axis {axis} has {nodes} nodes, {required} needed to differentiate")]
    TooFewNodes { axis: usize, nodes: usize, required: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invariant `{check}` violated: {detail}")]
    InvariantViolation { check: &'static str, detail: String },
    #[error("geometry `{0}` has no fibration structure")]
    NoFibration(String),
    #[error("fibre of dimension {0} is odd")]
    OddFiber(usize),
    #[error("unknown catalog geometry `{0}`")]
    UnknownGeometry(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("dimension parity: {0}")]
    DimensionParity(String),
    #[error("gluing mismatch: {0}")]
    GluingMismatch(String),
    #[error("connection has no potential; only its curvature is known")]
    MissingPotential,
    #[error("form is not closed: max |d C| = {0:e}")]
    NotClosed(f64),
    #[error("eta evaluations disagree: zeta route {zeta}, abel route {abel}")]
    EtaDivergence { zeta: f64, abel: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
