//! Layout quality: proximity, compactness and four convexity scores.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::geometry::{self, Point};
use crate::global::cluster_centers;
use crate::model::{extract_cluster_shapes, ClusterShape, GridLayout, SampleSet};
use crate::{Error, Result};

/// The convexity measures a layout can be scored or refined with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConvexityMeasure {
    /// Shape area over convex-hull area.
    Area,
    /// Share of collinear cell triples with both ends inside whose middle
    /// cell is inside as well.
    Triple,
    /// Convex-hull perimeter over shape perimeter.
    Perimeter,
    /// Mean, over unit boundary edges, of the area share on the shape's side
    /// of the edge's supporting line.
    Cut,
}

impl ConvexityMeasure {
    pub const ALL: [ConvexityMeasure; 4] = [
        ConvexityMeasure::Area,
        ConvexityMeasure::Triple,
        ConvexityMeasure::Perimeter,
        ConvexityMeasure::Cut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConvexityMeasure::Area => "area",
            ConvexityMeasure::Triple => "triple",
            ConvexityMeasure::Perimeter => "perimeter",
            ConvexityMeasure::Cut => "cut",
        }
    }
}

impl fmt::Display for ConvexityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConvexityMeasure {
    type Err = ();
    fn from_str(s: &str) -> core::result::Result<Self, ()> {
        match s.to_ascii_lowercase().as_str() {
            "area" | "a" => Ok(ConvexityMeasure::Area),
            "triple" | "t" => Ok(ConvexityMeasure::Triple),
            "perimeter" | "p" => Ok(ConvexityMeasure::Perimeter),
            "cut" | "c" => Ok(ConvexityMeasure::Cut),
            _ => Err(()),
        }
    }
}

/// Un-normalized proximity and compactness, in square cell units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RawScores {
    pub prox2: f64,
    pub comp: f64,
}

/// The six normalized scores of a layout; all lie in `(0, 1]`, higher is better.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MeasureReport {
    pub proximity: f64,
    pub compactness: f64,
    pub area_ratio: f64,
    pub triple_ratio: f64,
    pub perimeter_ratio: f64,
    pub cut_ratio: f64,
    pub raw: RawScores,
}

impl MeasureReport {
    pub fn convexity(&self, m: ConvexityMeasure) -> f64 {
        match m {
            ConvexityMeasure::Area => self.area_ratio,
            ConvexityMeasure::Triple => self.triple_ratio,
            ConvexityMeasure::Perimeter => self.perimeter_ratio,
            ConvexityMeasure::Cut => self.cut_ratio,
        }
    }

    /// Scores in the fixed order proximity, compactness, area, triple,
    /// perimeter, cut.
    pub fn scores(&self) -> [f64; 6] {
        [
            self.proximity,
            self.compactness,
            self.area_ratio,
            self.triple_ratio,
            self.perimeter_ratio,
            self.cut_ratio,
        ]
    }
}

fn dist_sq(a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    dx * dx + dy * dy
}

pub(crate) fn check_compatible(layout: &GridLayout, input: &GridLayout) -> Result<()> {
    if layout.spec() != input.spec() || layout.sample_clusters() != input.sample_clusters() {
        return Err(Error::IncompatibleLayouts);
    }
    Ok(())
}

/// Total squared displacement of every sample from its cell in `input`.
pub fn proximity_raw(layout: &GridLayout, input: &GridLayout) -> Result<f64> {
    check_compatible(layout, input)?;
    let spec = layout.spec();
    Ok((0..layout.sample_count())
        .map(|i| dist_sq(spec.center(layout.cell_of(i)), spec.center(input.cell_of(i))))
        .sum())
}

/// Similarity-driven proximity: `sum_ij (w |g_i - g_j| - (1 - c_ij))^2` with
/// `w = 1 / diagonal` so the distance term lies in `[0, 1]`.
pub fn proximity_similarity(layout: &GridLayout, samples: &SampleSet) -> Result<f64> {
    let n = layout.sample_count();
    if samples.len() != n || !samples.has_similarities() {
        return Err(Error::SimilarityDimension {
            rows: samples.len(),
            cols: usize::from(samples.has_similarities()) * samples.len(),
            expected: n,
        });
    }
    let w = 1.0 / layout.spec().diagonal();
    let pos = layout.positions();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let c = samples.similarity(i, j).unwrap_or(0.0);
            let d = w * libm::sqrt(dist_sq(pos[i], pos[j])) - (1.0 - c);
            total += d * d;
        }
    }
    Ok(total)
}

/// Total squared distance of each sample to its cluster's mean cell center.
pub fn compactness_raw(layout: &GridLayout) -> f64 {
    let centers = cluster_centers(layout);
    let spec = layout.spec();
    layout
        .sample_clusters()
        .iter()
        .enumerate()
        .map(|(i, c)| dist_sq(spec.center(layout.cell_of(i)), centers[c]))
        .sum()
}

fn hull_of(shape: &ClusterShape) -> Vec<Point> {
    geometry::hull_vertices(geometry::cell_hull_points(&shape.cells))
}

/// Hull perimeter over the perimeter of the shape with its components joined
/// by zero-width bridges, each bridge counted on both sides. The hull of a
/// connected set is never longer than its boundary, so the result lies in
/// `(0, 1]`, and scattering a cluster lowers it.
pub(crate) fn perimeter_score(hull_perimeter: f64, boundary_edges: u64, bridges: f64) -> f64 {
    hull_perimeter / (boundary_edges as f64 + 2.0 * bridges)
}

/// Scores one cluster shape; the result lies in `(0, 1]`.
pub fn convexity(shape: &ClusterShape, m: ConvexityMeasure) -> f64 {
    match m {
        ConvexityMeasure::Area => {
            let twice = geometry::twice_signed_area(&hull_of(shape));
            2.0 * shape.cells.len() as f64 / twice as f64
        }
        ConvexityMeasure::Triple => geometry::collinear_triple_counts(&shape.cells).ratio(),
        ConvexityMeasure::Perimeter => {
            let hull = geometry::ring_perimeter(&hull_of(shape));
            perimeter_score(
                hull,
                shape.boundary_length() as u64,
                geometry::bridge_length(&shape.cells),
            )
        }
        ConvexityMeasure::Cut => {
            let mut sum = 0.0;
            let mut edges = 0usize;
            for ring in &shape.boundary {
                let v = ring.vertices();
                for k in 0..v.len() {
                    let (a, b) = (v[k], v[(k + 1) % v.len()]);
                    let d = b - a;
                    let unit = Point::new(d.x.signum(), d.y.signum());
                    let mut p = a;
                    while p != b {
                        let q = p + unit;
                        sum += geometry::halfplane_area_fraction(shape, p, q).expect("ring edges lie on the boundary");
                        edges += 1;
                        p = q;
                    }
                }
            }
            sum / edges as f64
        }
    }
}

/// Unweighted mean of [`convexity`] over all cluster shapes.
pub fn layout_convexity(layout: &GridLayout, m: ConvexityMeasure) -> Result<f64> {
    let shapes = extract_cluster_shapes(layout)?;
    mean_convexity(&shapes, m)
}

fn mean_convexity(shapes: &[ClusterShape], m: ConvexityMeasure) -> Result<f64> {
    if shapes.is_empty() {
        return Err(Error::NoClusters);
    }
    Ok(shapes.iter().map(|s| convexity(s, m)).sum::<f64>() / shapes.len() as f64)
}

/// Scores `layout` against the reference `input` layout. Proximity and
/// compactness are normalized by `n * diagonal^2` before `x -> exp(-x)`.
pub fn report(layout: &GridLayout, input: &GridLayout) -> Result<MeasureReport> {
    let prox2 = proximity_raw(layout, input)?;
    let comp = compactness_raw(layout);
    let shapes = extract_cluster_shapes(layout)?;
    let scale = layout.sample_count().max(1) as f64 * layout.spec().diagonal_sq();
    Ok(MeasureReport {
        proximity: libm::exp(-prox2 / scale),
        compactness: libm::exp(-comp / scale),
        area_ratio: mean_convexity(&shapes, ConvexityMeasure::Area)?,
        triple_ratio: mean_convexity(&shapes, ConvexityMeasure::Triple)?,
        perimeter_ratio: mean_convexity(&shapes, ConvexityMeasure::Perimeter)?,
        cut_ratio: mean_convexity(&shapes, ConvexityMeasure::Cut)?,
        raw: RawScores { prox2, comp },
    })
}
