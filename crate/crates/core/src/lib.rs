//! Cluster-aware grid layout engine.
//!
//! Samples carrying a 2D projection and a cluster label are assigned to the
//! cells of a rectangular grid. A global phase solves a sequence of linear
//! assignment problems that trade input-layout proximity against cluster
//! compactness, and a local phase swaps boundary cells between clusters to
//! raise one of four convexity measures. The crate also carries the measure
//! suite used to score layouts and a sampling hierarchy for zoomable views.
//!
//! Everything here is pure computation over `alloc` collections, so the crate
//! builds for `no_std` targets. File formats, rendering, timing and the CLI
//! live in the `gridweave` crate.
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

mod error;
pub mod geometry;
pub mod global;
pub mod hierarchy;
pub mod lap;
pub mod local;
pub mod measures;
pub mod model;
pub mod pipeline;

pub use error::{Error, Result};
pub use geometry::{Point, Polygon};
pub use global::{LambdaMode, LambdaSchedule};
pub use measures::{ConvexityMeasure, MeasureReport};
pub use model::{
    Assignment, ClusterId, ClusterShape, GridLayout, GridSpec, Sample, SampleRecord, SampleSet, ValidationReport,
    Violation,
};
pub use pipeline::{Phase, PipelineConfig, PipelineId, PipelineOutput};
