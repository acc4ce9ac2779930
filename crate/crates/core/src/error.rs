use alloc::string::String;

use crate::model::Violation;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("grid dimensions must be at least 1x1, got {width}x{height}")]
    EmptyGrid { width: usize, height: usize },
    #[error("{samples} samples do not fit into {cells} cells")]
    TooManySamples { samples: usize, cells: usize },
    #[error("duplicate sample id `{0}`")]
    DuplicateId(String),
    #[error("sample `{0}` has a non-finite coordinate")]
    NonFinitePosition(String),
    #[error("similarity matrix is {rows}x{cols}, expected {expected}x{expected}")]
    SimilarityDimension { rows: usize, cols: usize, expected: usize },
    #[error("similarity matrix invalid at ({row}, {col}): {reason}")]
    SimilarityValue {
        row: usize,
        col: usize,
        reason: &'static str,
    },
    #[error("unknown cluster `{0}`")]
    UnknownCluster(String),
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("invalid layout: {0}")]
    InvalidLayout(Violation),
    #[error("layouts do not describe the same samples on the same grid")]
    IncompatibleLayouts,
    #[error("layout has no clusters")]
    NoClusters,
    #[error("degenerate hull: all points are collinear")]
    DegenerateHull,
    #[error("polygon needs at least 3 vertices and non-zero area")]
    DegeneratePolygon,
    #[error("edge {from:?}-{to:?} is not a unit edge on the shape boundary")]
    NotABoundaryEdge { from: (i64, i64), to: (i64, i64) },
    #[error("cost matrix must be square and finite")]
    InvalidCostMatrix,
    #[error("lambda {0} outside [0, 1]")]
    InvalidLambda(f64),
    #[error("no center for cluster {0}")]
    MissingClusterCenter(u32),
    #[error("lambda anchors coincide")]
    AnchorsCoincide,
    #[error("cells {0} and {1} cannot be swapped: {2}")]
    InvalidSwap(usize, usize, &'static str),
    #[error("cell {0} is outside the grid or empty")]
    InvalidSelection(usize),
    #[error("selection of {selected} representatives exceeds child capacity {capacity}")]
    SelectionTooLarge { selected: usize, capacity: usize },
    #[error("empty selection")]
    EmptySelection,
    #[error("unknown pipeline: {0}")]
    UnknownPipeline(String),
}
