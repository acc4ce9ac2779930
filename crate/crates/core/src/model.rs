//! Domain types shared by every phase: samples, grids, assignments, layouts
//! and the cell-union shapes of clusters.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{self, Polygon};
use crate::{Error, Result};

/// Dense cluster index. Ids are assigned in sorted order of cluster names, so
/// they are stable for a given set of names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClusterId(pub u32);

impl ClusterId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One input record as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub cluster: String,
    pub meta: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub id: String,
    pub position: [f64; 2],
    pub cluster: ClusterId,
    pub meta: BTreeMap<String, String>,
}

/// Samples with projected positions, cluster labels and optional pairwise
/// similarities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    samples: Vec<Sample>,
    cluster_names: Vec<String>,
    /// Row-major `n x n`.
    similarities: Option<Vec<f64>>,
    by_id: BTreeMap<String, usize>,
}

const SIMILARITY_TOL: f64 = 1e-9;

impl SampleSet {
    pub fn new(records: Vec<SampleRecord>, similarities: Option<Vec<Vec<f64>>>) -> Result<Self> {
        let names: BTreeSet<&str> = records.iter().map(|r| r.cluster.as_str()).collect();
        let cluster_names: Vec<String> = names.into_iter().map(String::from).collect();
        Self::with_cluster_names(records, similarities, cluster_names)
    }

    /// Builds a set against a fixed cluster-name table, which must contain
    /// every record's cluster. Used to keep cluster ids stable across subsets.
    pub fn with_cluster_names(
        records: Vec<SampleRecord>,
        similarities: Option<Vec<Vec<f64>>>,
        cluster_names: Vec<String>,
    ) -> Result<Self> {
        let mut by_id = BTreeMap::new();
        let mut samples = Vec::with_capacity(records.len());
        for (index, record) in records.into_iter().enumerate() {
            if !(record.x.is_finite() && record.y.is_finite()) {
                return Err(Error::NonFinitePosition(record.id));
            }
            if by_id.insert(record.id.clone(), index).is_some() {
                return Err(Error::DuplicateId(record.id));
            }
            let cluster = cluster_names
                .binary_search(&record.cluster)
                .map_err(|_| Error::UnknownCluster(record.cluster.clone()))?;
            samples.push(Sample {
                id: record.id,
                position: [record.x, record.y],
                cluster: ClusterId(cluster as u32),
                meta: record.meta,
            });
        }
        let n = samples.len();
        let similarities = match similarities {
            None => None,
            Some(rows) => Some(validate_similarities(rows, n)?),
        };
        Ok(Self {
            samples,
            cluster_names,
            similarities,
            by_id,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn sample(&self, index: usize) -> &Sample {
        &self.samples[index]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn cluster_names(&self) -> &[String] {
        &self.cluster_names
    }

    pub fn cluster_name(&self, id: ClusterId) -> &str {
        &self.cluster_names[id.index()]
    }

    pub fn cluster_id(&self, name: &str) -> Option<ClusterId> {
        self.cluster_names
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(|i| ClusterId(i as u32))
    }

    /// Cluster of every sample, by sample index.
    pub fn clusters(&self) -> Vec<ClusterId> {
        self.samples.iter().map(|s| s.cluster).collect()
    }

    pub fn positions(&self) -> Vec<[f64; 2]> {
        self.samples.iter().map(|s| s.position).collect()
    }

    pub fn has_similarities(&self) -> bool {
        self.similarities.is_some()
    }

    pub fn similarity(&self, i: usize, j: usize) -> Option<f64> {
        self.similarities.as_ref().map(|m| m[i * self.samples.len() + j])
    }

    /// Similarity matrix as rows, if present.
    pub fn similarity_rows(&self) -> Option<Vec<Vec<f64>>> {
        let n = self.samples.len();
        self.similarities
            .as_ref()
            .map(|m| m.chunks(n.max(1)).take(n).map(|r| r.to_vec()).collect())
    }

    /// The samples at `indices`, in that order, sharing this set's cluster ids.
    pub fn subset(&self, indices: &[usize]) -> SampleSet {
        let samples: Vec<Sample> = indices.iter().map(|&i| self.samples[i].clone()).collect();
        let by_id = samples.iter().enumerate().map(|(k, s)| (s.id.clone(), k)).collect();
        let n = self.samples.len();
        let similarities = self.similarities.as_ref().map(|m| {
            let mut out = Vec::with_capacity(indices.len() * indices.len());
            for &i in indices {
                for &j in indices {
                    out.push(m[i * n + j]);
                }
            }
            out
        });
        SampleSet {
            samples,
            cluster_names: self.cluster_names.clone(),
            similarities,
            by_id,
        }
    }
}

fn validate_similarities(rows: Vec<Vec<f64>>, n: usize) -> Result<Vec<f64>> {
    if rows.len() != n {
        return Err(Error::SimilarityDimension {
            rows: rows.len(),
            cols: rows.first().map_or(0, Vec::len),
            expected: n,
        });
    }
    let mut flat = Vec::with_capacity(n * n);
    for row in &rows {
        if row.len() != n {
            return Err(Error::SimilarityDimension {
                rows: rows.len(),
                cols: row.len(),
                expected: n,
            });
        }
        flat.extend_from_slice(row);
    }
    for i in 0..n {
        for j in 0..n {
            let c = flat[i * n + j];
            let err = |reason| Error::SimilarityValue { row: i, col: j, reason };
            if !c.is_finite() || !(0.0..=1.0).contains(&c) {
                return Err(err("value outside [0, 1]"));
            }
            if i == j && (c - 1.0).abs() > SIMILARITY_TOL {
                return Err(err("diagonal must be 1"));
            }
            if (c - flat[j * n + i]).abs() > SIMILARITY_TOL {
                return Err(err("matrix is not symmetric"));
            }
        }
    }
    Ok(flat)
}

/// Grid dimensions in cells. Cell `(col, row)` has index `row * width + col`
/// and center `(col + 0.5, row + 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    width: usize,
    height: usize,
}

impl GridSpec {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyGrid { width, height });
        }
        Ok(Self { width, height })
    }

    pub fn square(side: usize) -> Result<Self> {
        Self::new(side, side)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn capacity(&self) -> usize {
        self.width * self.height
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        debug_assert!(col < self.width && row < self.height);
        row * self.width + col
    }

    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell % self.width, cell / self.width)
    }

    pub fn center(&self, cell: usize) -> [f64; 2] {
        let (c, r) = self.coords(cell);
        [c as f64 + 0.5, r as f64 + 0.5]
    }

    pub fn diagonal_sq(&self) -> f64 {
        (self.width * self.width + self.height * self.height) as f64
    }

    pub fn diagonal(&self) -> f64 {
        libm::sqrt(self.diagonal_sq())
    }

    /// Indices of the up-to-8 neighbours of `cell`.
    pub fn neighbors8(&self, cell: usize) -> impl Iterator<Item = usize> + '_ {
        let (c, r) = self.coords(cell);
        let (c, r) = (c as isize, r as isize);
        (-1isize..=1)
            .flat_map(move |dr| (-1isize..=1).map(move |dc| (dc, dr)))
            .filter(|&(dc, dr)| dc != 0 || dr != 0)
            .filter_map(move |(dc, dr)| {
                let (nc, nr) = (c + dc, r + dr);
                (nc >= 0 && nr >= 0 && (nc as usize) < self.width && (nr as usize) < self.height)
                    .then(|| nr as usize * self.width + nc as usize)
            })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// Sample-to-cell mapping with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    grid: GridSpec,
    cell_of: Vec<usize>,
    sample_of: Vec<Option<usize>>,
}

impl Assignment {
    /// Checked constructor: `cell_of` must be injective and in range.
    pub fn from_cells(grid: GridSpec, cell_of: Vec<usize>) -> Result<Self> {
        if cell_of.len() > grid.capacity() {
            return Err(Error::TooManySamples {
                samples: cell_of.len(),
                cells: grid.capacity(),
            });
        }
        let mut sample_of = vec![None; grid.capacity()];
        for (sample, &cell) in cell_of.iter().enumerate() {
            if cell >= grid.capacity() {
                return Err(Error::InvalidLayout(Violation::CellOutOfRange { sample, cell }));
            }
            if let Some(other) = sample_of[cell] {
                return Err(Error::InvalidLayout(Violation::DuplicateCell {
                    cell,
                    first: other,
                    second: sample,
                }));
            }
            sample_of[cell] = Some(sample);
        }
        Ok(Self {
            grid,
            cell_of,
            sample_of,
        })
    }

    /// Unchecked constructor; run [`validate_layout`] on layouts built from it.
    pub fn from_raw(grid: GridSpec, cell_of: Vec<usize>, sample_of: Vec<Option<usize>>) -> Self {
        Self {
            grid,
            cell_of,
            sample_of,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn cell_of(&self) -> &[usize] {
        &self.cell_of
    }

    pub fn sample_of(&self) -> &[Option<usize>] {
        &self.sample_of
    }

    pub fn len(&self) -> usize {
        self.cell_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cell_of.is_empty()
    }
}

/// An assignment together with the cluster label of every cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLayout {
    assignment: Assignment,
    sample_clusters: Vec<ClusterId>,
    labels: Vec<Option<ClusterId>>,
}

impl GridLayout {
    /// Builds a layout from `cell_of` (sample index to cell index) and the
    /// cluster of every sample.
    pub fn new(spec: GridSpec, cell_of: Vec<usize>, sample_clusters: Vec<ClusterId>) -> Result<Self> {
        if cell_of.len() != sample_clusters.len() {
            return Err(Error::IncompatibleLayouts);
        }
        let assignment = Assignment::from_cells(spec, cell_of)?;
        let labels = assignment
            .sample_of
            .iter()
            .map(|s| s.map(|s| sample_clusters[s]))
            .collect();
        Ok(Self {
            assignment,
            sample_clusters,
            labels,
        })
    }

    /// Unchecked constructor, paired with [`validate_layout`].
    pub fn from_parts(assignment: Assignment, sample_clusters: Vec<ClusterId>, labels: Vec<Option<ClusterId>>) -> Self {
        Self {
            assignment,
            sample_clusters,
            labels,
        }
    }

    pub fn spec(&self) -> GridSpec {
        self.assignment.grid
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn labels(&self) -> &[Option<ClusterId>] {
        &self.labels
    }

    pub fn label(&self, cell: usize) -> Option<ClusterId> {
        self.labels[cell]
    }

    pub fn cell_of(&self, sample: usize) -> usize {
        self.assignment.cell_of[sample]
    }

    pub fn sample_at(&self, cell: usize) -> Option<usize> {
        self.assignment.sample_of[cell]
    }

    pub fn sample_count(&self) -> usize {
        self.assignment.cell_of.len()
    }

    pub fn sample_clusters(&self) -> &[ClusterId] {
        &self.sample_clusters
    }

    /// Distinct cluster ids present in the layout, ascending.
    pub fn cluster_ids(&self) -> Vec<ClusterId> {
        let set: BTreeSet<ClusterId> = self.sample_clusters.iter().copied().collect();
        set.into_iter().collect()
    }

    /// Position of every sample's cell center.
    pub fn positions(&self) -> Vec<[f64; 2]> {
        let spec = self.spec();
        self.assignment.cell_of.iter().map(|&c| spec.center(c)).collect()
    }

    /// Exchanges the contents of two cells.
    pub fn swap_cells(&mut self, a: usize, b: usize) {
        let sa = self.assignment.sample_of[a];
        let sb = self.assignment.sample_of[b];
        self.assignment.sample_of[a] = sb;
        self.assignment.sample_of[b] = sa;
        if let Some(s) = sa {
            self.assignment.cell_of[s] = b;
        }
        if let Some(s) = sb {
            self.assignment.cell_of[s] = a;
        }
        self.labels.swap(a, b);
    }

    pub(crate) fn with_cells(&self, cell_of: Vec<usize>) -> Result<Self> {
        Self::new(self.spec(), cell_of, self.sample_clusters.clone())
    }
}

/// A single problem found by [`validate_layout`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    CellOutOfRange {
        sample: usize,
        cell: usize,
    },
    DuplicateCell {
        cell: usize,
        first: usize,
        second: usize,
    },
    InverseMismatch {
        cell: usize,
    },
    LabelMismatch {
        cell: usize,
    },
    LabelOnEmpty {
        cell: usize,
    },
    MissingLabel {
        cell: usize,
    },
    TableSize {
        table: &'static str,
        len: usize,
        expected: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CellOutOfRange { sample, cell } => {
                write!(f, "cell out of range: sample {sample} -> cell {cell}")
            }
            Violation::DuplicateCell { cell, first, second } => {
                write!(f, "duplicate cell: {cell} holds samples {first} and {second}")
            }
            Violation::InverseMismatch { cell } => {
                write!(f, "inverse mismatch: cell {cell}")
            }
            Violation::LabelMismatch { cell } => write!(f, "label mismatch: cell {cell}"),
            Violation::LabelOnEmpty { cell } => write!(f, "label on empty cell: {cell}"),
            Violation::MissingLabel { cell } => write!(f, "missing label: cell {cell}"),
            Violation::TableSize { table, len, expected } => {
                write!(f, "table size: {table} has {len} entries, expected {expected}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks bijectivity of the assignment and consistency of the labels.
pub fn validate_layout(layout: &GridLayout) -> ValidationReport {
    let mut violations = Vec::new();
    let spec = layout.spec();
    let cells = spec.capacity();
    let a = &layout.assignment;
    let n = a.cell_of.len();

    if a.sample_of.len() != cells {
        violations.push(Violation::TableSize {
            table: "sample_of",
            len: a.sample_of.len(),
            expected: cells,
        });
    }
    if layout.labels.len() != cells {
        violations.push(Violation::TableSize {
            table: "labels",
            len: layout.labels.len(),
            expected: cells,
        });
    }
    if layout.sample_clusters.len() != n {
        violations.push(Violation::TableSize {
            table: "sample_clusters",
            len: layout.sample_clusters.len(),
            expected: n,
        });
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }

    let mut holder: Vec<Option<usize>> = vec![None; cells];
    for (sample, &cell) in a.cell_of.iter().enumerate() {
        if cell >= cells {
            violations.push(Violation::CellOutOfRange { sample, cell });
            continue;
        }
        match holder[cell] {
            Some(first) => violations.push(Violation::DuplicateCell {
                cell,
                first,
                second: sample,
            }),
            None => holder[cell] = Some(sample),
        }
    }
    for cell in 0..cells {
        let recorded = a.sample_of[cell];
        let consistent = match recorded {
            Some(s) => s < n && a.cell_of[s] == cell,
            None => holder[cell].is_none(),
        };
        if !consistent {
            violations.push(Violation::InverseMismatch { cell });
        }
        match (recorded, layout.labels[cell]) {
            (Some(s), Some(label)) if s < n && layout.sample_clusters[s] != label => {
                violations.push(Violation::LabelMismatch { cell })
            }
            (Some(_), None) => violations.push(Violation::MissingLabel { cell }),
            (None, Some(_)) => violations.push(Violation::LabelOnEmpty { cell }),
            _ => {}
        }
    }
    ValidationReport { violations }
}

/// The cells of one cluster and the rectilinear boundary of their union.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterShape {
    pub cluster: ClusterId,
    /// `(col, row)` pairs sorted by row, then column.
    pub cells: Vec<(usize, usize)>,
    /// Outer rings counterclockwise, holes clockwise, in cell-corner units.
    pub boundary: Vec<Polygon>,
}

impl ClusterShape {
    pub fn from_cells(cluster: ClusterId, mut cells: Vec<(usize, usize)>) -> Self {
        cells.sort_by_key(|&(c, r)| (r, c));
        cells.dedup();
        let boundary = geometry::trace_boundary(&cells);
        Self {
            cluster,
            cells,
            boundary,
        }
    }

    /// Total number of unit boundary edges over all rings.
    pub fn boundary_length(&self) -> usize {
        self.boundary.iter().map(|p| p.rectilinear_length() as usize).sum()
    }
}

/// One shape per cluster present in the layout, ordered by cluster id.
pub fn extract_cluster_shapes(layout: &GridLayout) -> Result<Vec<ClusterShape>> {
    let report = validate_layout(layout);
    if let Some(v) = report.violations.into_iter().next() {
        return Err(Error::InvalidLayout(v));
    }
    let spec = layout.spec();
    let mut groups: BTreeMap<ClusterId, Vec<(usize, usize)>> = BTreeMap::new();
    for (cell, label) in layout.labels.iter().enumerate() {
        if let Some(id) = label {
            groups.entry(*id).or_default().push(spec.coords(cell));
        }
    }
    Ok(groups
        .into_iter()
        .map(|(id, cells)| ClusterShape::from_cells(id, cells))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use alloc::string::ToString;

    fn grid(w: usize, h: usize) -> GridSpec {
        GridSpec::new(w, h).unwrap()
    }

    fn ids(v: &[u32]) -> Vec<ClusterId> {
        v.iter().map(|&c| ClusterId(c)).collect()
    }

    #[test]
    fn identity_layout_validates() {
        let layout = GridLayout::new(grid(2, 2), vec![0, 1, 2, 3], ids(&[0, 0, 1, 1])).unwrap();
        assert!(validate_layout(&layout).is_ok());
    }

    #[test]
    fn duplicate_cell_is_reported() {
        let spec = grid(2, 2);
        let assignment = Assignment::from_raw(spec, vec![0, 0, 2, 3], vec![Some(0), None, Some(2), Some(3)]);
        let layout = GridLayout::from_parts(
            assignment,
            ids(&[0, 0, 1, 1]),
            vec![Some(ClusterId(0)), None, Some(ClusterId(1)), Some(ClusterId(1))],
        );
        let report = validate_layout(&layout);
        assert!(report
            .violations
            .iter()
            .any(|v| v.to_string().starts_with("duplicate cell")));
    }

    #[test]
    fn label_mismatch_is_reported() {
        let spec = grid(2, 2);
        let assignment = Assignment::from_cells(spec, vec![0, 1, 2, 3]).unwrap();
        let mut labels: Vec<_> = ids(&[0, 0, 1, 1]).into_iter().map(Some).collect();
        labels[0] = Some(ClusterId(1));
        let layout = GridLayout::from_parts(assignment, ids(&[0, 0, 1, 1]), labels);
        let report = validate_layout(&layout);
        assert_eq!(report.violations, vec![Violation::LabelMismatch { cell: 0 }]);
        assert!(report.violations[0].to_string().starts_with("label mismatch"));
    }

    #[test]
    fn out_of_range_and_label_on_empty() {
        let spec = grid(2, 1);
        let assignment = Assignment::from_raw(spec, vec![5], vec![None, None]);
        let layout = GridLayout::from_parts(assignment, ids(&[0]), vec![None, Some(ClusterId(0))]);
        let report = validate_layout(&layout);
        assert!(report
            .violations
            .contains(&Violation::CellOutOfRange { sample: 0, cell: 5 }));
        assert!(report.violations.contains(&Violation::LabelOnEmpty { cell: 1 }));
    }

    #[test]
    fn checked_constructor_rejects_overfull_grid() {
        let err = GridLayout::new(grid(1, 1), vec![0, 0], ids(&[0, 0])).unwrap_err();
        assert!(matches!(err, Error::TooManySamples { .. }));
    }

    #[test]
    fn single_cluster_square_shape() {
        let layout = GridLayout::new(grid(2, 2), vec![0, 1, 2, 3], ids(&[3, 3, 3, 3])).unwrap();
        let shapes = extract_cluster_shapes(&layout).unwrap();
        assert_eq!(shapes.len(), 1);
        assert_eq!(shapes[0].cells.len(), 4);
        assert_eq!(shapes[0].boundary.len(), 1);
        let expected = [(0, 0), (2, 0), (2, 2), (0, 2)].map(|(x, y)| Point::new(x, y));
        assert_eq!(shapes[0].boundary[0].vertices(), &expected);
    }

    #[test]
    fn halves_give_two_shapes() {
        let spec = grid(4, 4);
        let clusters: Vec<_> = (0..16)
            .map(|cell| ClusterId(u32::from(spec.coords(cell).0 >= 2)))
            .collect();
        let layout = GridLayout::new(spec, (0..16).collect(), clusters).unwrap();
        let shapes = extract_cluster_shapes(&layout).unwrap();
        assert_eq!(shapes.len(), 2);
        assert!(shapes.iter().all(|s| s.cells.len() == 8));
    }

    #[test]
    fn l_tromino_boundary() {
        let shape = ClusterShape::from_cells(ClusterId(0), vec![(0, 0), (1, 0), (0, 1)]);
        let expected = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)].map(|(x, y)| Point::new(x, y));
        assert_eq!(shape.boundary.len(), 1);
        assert_eq!(shape.boundary[0].vertices(), &expected);
    }

    #[test]
    fn empty_cells_belong_to_no_shape() {
        let layout = GridLayout::new(grid(3, 1), vec![0, 2], ids(&[0, 0])).unwrap();
        let shapes = extract_cluster_shapes(&layout).unwrap();
        assert_eq!(shapes.len(), 1);
        assert_eq!(shapes[0].cells, vec![(0, 0), (2, 0)]);
        assert_eq!(shapes[0].boundary.len(), 2);
    }

    #[test]
    fn sample_set_rejects_duplicates_and_bad_similarities() {
        let rec = |id: &str| SampleRecord {
            id: id.to_string(),
            x: 0.0,
            y: 0.0,
            cluster: "a".to_string(),
            meta: BTreeMap::new(),
        };
        let err = SampleSet::new(vec![rec("s1"), rec("s1")], None).unwrap_err();
        assert_eq!(err, Error::DuplicateId("s1".to_string()));

        let err = SampleSet::new(vec![rec("s1"), rec("s2")], Some(vec![vec![1.0]])).unwrap_err();
        assert!(matches!(err, Error::SimilarityDimension { expected: 2, .. }));

        let asym = vec![vec![1.0, 0.2], vec![0.3, 1.0]];
        let err = SampleSet::new(vec![rec("s1"), rec("s2")], Some(asym)).unwrap_err();
        assert!(matches!(err, Error::SimilarityValue { .. }));

        let mut bad = rec("s3");
        bad.x = f64::NAN;
        assert!(matches!(
            SampleSet::new(vec![bad], None),
            Err(Error::NonFinitePosition(_))
        ));
    }

    #[test]
    fn neighbors_of_corner_and_interior() {
        let spec = grid(3, 3);
        let mut corner: Vec<_> = spec.neighbors8(0).collect();
        corner.sort_unstable();
        assert_eq!(corner, vec![1, 3, 4]);
        assert_eq!(spec.neighbors8(4).count(), 8);
    }
}
