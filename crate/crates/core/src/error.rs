use thiserror::Error;

use crate::lattice::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{what}: {value} exceeds the supported limit of {limit}")]
    Capacity {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("point {bits:#b} does not fit in dimension {dim}")]
    PointOutOfRange { bits: u64, dim: usize },

    #[error("invalid binary string {0:?}")]
    BadPointString(String),

    #[error("invalid rational {0:?}")]
    BadRational(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("probability {value} for {what} is outside {range}")]
    ProbabilityOutOfRange {
        what: String,
        value: String,
        range: &'static str,
    },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("A ∪ C{block} is not closed upwards: {below} is in it but {above} is not")]
    NotUpset {
        block: usize,
        below: Point,
        above: Point,
    },

    #[error("conditioning event for coordinate {coord} with prefix {prefix:#b} has zero mass")]
    ZeroMassCondition { coord: usize, prefix: u64 },

    #[error("measure is not a product measure")]
    NotProduct,

    #[error("fiber over {point} has illegal label pair ({lower}, {upper})")]
    IllegalFiber {
        point: Point,
        lower: String,
        upper: String,
    },

    #[error("measure violates the FKG lattice condition at ({a}, {b})")]
    NotFkg { a: Point, b: Point },

    #[error("measure lacks full support: weight of {0} is zero")]
    NotFullSupport(Point),

    #[error("invalid realization: {0}")]
    InvalidRealization(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
