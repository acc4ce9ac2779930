//! Sampling hierarchy for zoomable layouts.
//!
//! A node shows a set of representative samples on its grid. Every sample of
//! the node that is not shown is attached to its nearest representative in
//! projection space. Zooming into a selection lays out the selected
//! representatives together with (a sample of) the samples attached to them,
//! with the carried representatives placed where the selection had them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::global::{assign_positions, baseline_grid_from_projection};
use crate::model::{ClusterId, GridLayout, GridSpec, SampleSet};
use crate::pipeline::{run_from_input, PipelineConfig, PipelineId, PipelineOutput};
use crate::{Error, Result};

/// One level of the hierarchy. Sample numbers index the full sample set the
/// hierarchy was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyNode {
    pub id: String,
    pub parent: Option<String>,
    pub spec: GridSpec,
    /// Shown samples; layout sample `i` is `representatives[i]`.
    pub representatives: Vec<usize>,
    /// Hidden samples attached to each representative.
    pub assigned: BTreeMap<usize, Vec<usize>>,
    /// Cell-unit positions of representatives carried over from the parent.
    pub anchors: BTreeMap<usize, [f64; 2]>,
    /// Pipeline result; its `input` is the anchored input layout.
    pub output: PipelineOutput,
}

impl HierarchyNode {
    pub fn layout(&self) -> &GridLayout {
        &self.output.layout
    }

    /// Every sample the node stands for, ascending.
    pub fn pool(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.representatives.clone();
        all.extend(self.assigned.values().flatten().copied());
        all.sort_unstable();
        all
    }

    /// Full-set sample number shown at `cell`, if any.
    pub fn sample_at(&self, cell: usize) -> Option<usize> {
        self.output.layout.sample_at(cell).map(|i| self.representatives[i])
    }
}

/// Splits `total` over `weights` proportionally by largest remainder; ties
/// go to the earlier entry. With `at_least_one`, every positive weight gets
/// one slot first (when there are enough slots).
fn apportion(weights: &[usize], total: usize, at_least_one: bool) -> Vec<usize> {
    let mut quota = alloc::vec![0; weights.len()];
    let mut left = total;
    if at_least_one && weights.iter().filter(|&&w| w > 0).count() <= total {
        for (q, &w) in quota.iter_mut().zip(weights) {
            if w > 0 {
                *q = 1;
                left -= 1;
            }
        }
    }
    let room: Vec<usize> = weights.iter().zip(&quota).map(|(&w, &q)| w - q).collect();
    let sum: usize = room.iter().sum();
    if sum == 0 || left == 0 {
        return quota;
    }
    let left = left.min(sum);
    let mut rem: Vec<(usize, usize)> = Vec::with_capacity(weights.len());
    let mut given = 0;
    for (i, &r) in room.iter().enumerate() {
        let exact = r * left;
        let whole = exact / sum;
        quota[i] += whole;
        given += whole;
        rem.push((exact % sum, i));
    }
    rem.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in rem.iter().take(left - given) {
        quota[i] += 1;
    }
    quota
}

fn dist_sq(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1])
}

/// Attaches every sample in `others` to its nearest representative by
/// projected position (ties to the earlier representative).
pub fn nearest_representatives(
    samples: &SampleSet,
    representatives: &[usize],
    others: &[usize],
) -> BTreeMap<usize, Vec<usize>> {
    let mut out: BTreeMap<usize, Vec<usize>> = representatives.iter().map(|&r| (r, Vec::new())).collect();
    for &s in others {
        let p = samples.sample(s).position;
        let mut best = representatives[0];
        let mut best_d = f64::INFINITY;
        for &r in representatives {
            let d = dist_sq(p, samples.sample(r).position);
            if d < best_d {
                best = r;
                best_d = d;
            }
        }
        out.get_mut(&best).expect("keyed by representatives").push(s);
    }
    out
}

/// Draws `quota[i]` members from each group with a seeded shuffle.
fn draw(groups: &[Vec<usize>], quota: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut chosen = Vec::new();
    for (g, &q) in groups.iter().zip(quota) {
        let mut members = g.clone();
        members.shuffle(rng);
        chosen.extend_from_slice(&members[..q]);
    }
    chosen
}

#[allow(clippy::too_many_arguments)]
fn finish(
    samples: &SampleSet,
    id: String,
    parent: Option<String>,
    spec: GridSpec,
    mut representatives: Vec<usize>,
    pool: &[usize],
    anchors: BTreeMap<usize, [f64; 2]>,
    input: GridLayout,
    pipeline: PipelineId,
    cfg: &PipelineConfig,
) -> Result<HierarchyNode> {
    representatives.sort_unstable();
    let others: Vec<usize> = pool
        .iter()
        .copied()
        .filter(|s| representatives.binary_search(s).is_err())
        .collect();
    let assigned = nearest_representatives(samples, &representatives, &others);
    let output = run_from_input(&input, pipeline, cfg)?;
    Ok(HierarchyNode {
        id,
        parent,
        spec,
        representatives,
        assigned,
        anchors,
        output,
    })
}

/// Picks representatives by cluster-stratified sampling and lays them out.
pub fn build_root(
    samples: &SampleSet,
    spec: GridSpec,
    seed: u64,
    pipeline: PipelineId,
    cfg: &PipelineConfig,
) -> Result<HierarchyNode> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let take = samples.len().min(spec.capacity());
    let mut groups: Vec<Vec<usize>> = alloc::vec![Vec::new(); samples.cluster_names().len()];
    for (i, c) in samples.clusters().into_iter().enumerate() {
        groups[c.index()].push(i);
    }
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let quota = apportion(&sizes, take, true);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reps = draw(&groups, &quota, &mut rng);
    reps.sort_unstable();
    let input = baseline_grid_from_projection(&samples.subset(&reps), spec)?;
    let pool: Vec<usize> = (0..samples.len()).collect();
    finish(
        samples,
        "root".into(),
        None,
        spec,
        reps,
        &pool,
        BTreeMap::new(),
        input,
        pipeline,
        cfg,
    )
}

/// Lays out the representatives at `selected_cells` of `node` together with
/// samples attached to them, as a new node `child_id` on grid `spec`.
#[allow(clippy::too_many_arguments)]
pub fn zoom(
    samples: &SampleSet,
    node: &HierarchyNode,
    selected_cells: &[usize],
    spec: GridSpec,
    child_id: String,
    seed: u64,
    pipeline: PipelineId,
    cfg: &PipelineConfig,
) -> Result<HierarchyNode> {
    if selected_cells.is_empty() {
        return Err(Error::EmptySelection);
    }
    let parent_spec = node.spec;
    let mut cells: Vec<usize> = selected_cells.to_vec();
    cells.sort_unstable();
    cells.dedup();
    let mut selected = Vec::with_capacity(cells.len());
    for &cell in &cells {
        if cell >= parent_spec.capacity() {
            return Err(Error::InvalidSelection(cell));
        }
        selected.push(node.sample_at(cell).ok_or(Error::InvalidSelection(cell))?);
    }
    if selected.len() > spec.capacity() {
        return Err(Error::SelectionTooLarge {
            selected: selected.len(),
            capacity: spec.capacity(),
        });
    }

    // Selected representatives in ascending sample order, with their cells.
    let mut carried: Vec<(usize, usize)> = selected.iter().copied().zip(cells.iter().copied()).collect();
    carried.sort_unstable();
    let hidden: Vec<Vec<usize>> = carried
        .iter()
        .map(|(s, _)| node.assigned.get(s).cloned().unwrap_or_default())
        .collect();
    let mut pool: Vec<usize> = carried.iter().map(|&(s, _)| s).collect();
    pool.extend(hidden.iter().flatten().copied());
    pool.sort_unstable();

    let room = spec.capacity().min(pool.len()) - carried.len();
    let sizes: Vec<usize> = hidden.iter().map(Vec::len).collect();
    let quota = apportion(&sizes, room, false);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let extra = draw(&hidden, &quota, &mut rng);

    // Carried representatives keep their relative placement: the bounding box
    // of their parent cell centers is stretched over the child grid.
    let extent = [spec.width() as f64, spec.height() as f64];
    let parent_pos: Vec<[f64; 2]> = carried.iter().map(|&(_, c)| parent_spec.center(c)).collect();
    let fit = Fit::new(&parent_pos, extent);
    let mut anchors = BTreeMap::new();
    for (&(s, _), p) in carried.iter().zip(&parent_pos) {
        anchors.insert(s, fit.map(*p));
    }

    // Newly shown samples sit around the anchor of the representative they
    // were attached to, offset by their projected displacement from it.
    let pool_pos: Vec<[f64; 2]> = pool.iter().map(|&s| samples.sample(s).position).collect();
    let spread = Fit::new(&pool_pos, extent);
    let mut owner_of: BTreeMap<usize, usize> = BTreeMap::new();
    for (&(rep, _), group) in carried.iter().zip(&hidden) {
        for &s in group {
            owner_of.insert(s, rep);
        }
    }
    let mut reps: Vec<usize> = carried.iter().map(|&(s, _)| s).collect();
    reps.extend_from_slice(&extra);
    reps.sort_unstable();
    let positions: Vec<[f64; 2]> = reps
        .iter()
        .map(|s| match anchors.get(s) {
            Some(&a) => a,
            None => {
                let rep = owner_of[s];
                let (p, q) = (samples.sample(*s).position, samples.sample(rep).position);
                let a = anchors[&rep];
                let mut out = [0.0; 2];
                for k in 0..2 {
                    out[k] = (a[k] + (p[k] - q[k]) * spread.scale[k]).clamp(0.5, extent[k] - 0.5);
                }
                out
            }
        })
        .collect();
    let clusters: Vec<ClusterId> = reps.iter().map(|&s| samples.sample(s).cluster).collect();
    let input = assign_positions(spec, &positions, clusters)?;
    finish(
        samples,
        child_id,
        Some(node.id.clone()),
        spec,
        reps,
        &pool,
        anchors,
        input,
        pipeline,
        cfg,
    )
}

/// Affine map of a point cloud's bounding box onto the span of cell centers
/// of a grid with the given extent; a flat axis maps to the middle.
struct Fit {
    lo: [f64; 2],
    scale: [f64; 2],
    extent: [f64; 2],
}

impl Fit {
    fn new(points: &[[f64; 2]], extent: [f64; 2]) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let mut scale = [0.0; 2];
        for k in 0..2 {
            let span = hi[k] - lo[k];
            scale[k] = if span > 0.0 { (extent[k] - 1.0) / span } else { 0.0 };
        }
        Self { lo, scale, extent }
    }

    fn map(&self, p: [f64; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for k in 0..2 {
            out[k] = if self.scale[k] > 0.0 {
                0.5 + (p[k] - self.lo[k]) * self.scale[k]
            } else {
                self.extent[k] / 2.0
            };
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_layout, SampleRecord};
    use alloc::format;
    use alloc::vec;
    use rand::Rng;

    fn set(n: usize, clusters: usize, seed: u64) -> SampleSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let records = (0..n)
            .map(|i| {
                let c = i % clusters;
                let (cx, cy) = ((c as f64 * 0.37) % 1.0, (c as f64 * 0.61) % 1.0);
                SampleRecord {
                    id: format!("s{i}"),
                    x: cx + rng.random_range(-0.1..0.1),
                    y: cy + rng.random_range(-0.1..0.1),
                    cluster: format!("c{c}"),
                    meta: Default::default(),
                }
            })
            .collect();
        SampleSet::new(records, None).unwrap()
    }

    fn cfg() -> PipelineConfig {
        PipelineConfig::default()
    }

    #[test]
    fn apportion_is_proportional_and_exact() {
        assert_eq!(apportion(&[100, 100], 20, true), vec![10, 10]);
        assert_eq!(apportion(&[1, 99], 10, true), vec![1, 9]);
        assert_eq!(apportion(&[3, 3, 3], 4, false), vec![2, 1, 1]);
        assert_eq!(apportion(&[0, 5], 3, true), vec![0, 3]);
        assert_eq!(apportion(&[2, 2], 10, false), vec![2, 2]);
        for total in 0..40 {
            let q = apportion(&[7, 13, 1, 22], total, true);
            assert_eq!(q.iter().sum::<usize>(), total.min(43));
        }
    }

    #[test]
    fn small_sets_show_everything() {
        let s = set(30, 3, 1);
        let root = build_root(&s, GridSpec::square(6).unwrap(), 0, PipelineId::G, &cfg()).unwrap();
        assert_eq!(root.representatives, (0..30).collect::<Vec<_>>());
        assert!(root.assigned.values().all(Vec::is_empty));
        assert!(validate_layout(root.layout()).is_ok());
    }

    #[test]
    fn root_sampling_is_stratified() {
        let s = set(200, 2, 2);
        let root = build_root(&s, GridSpec::new(5, 4).unwrap(), 3, PipelineId::Baseline, &cfg()).unwrap();
        let per: Vec<usize> = (0..2)
            .map(|c| {
                root.representatives
                    .iter()
                    .filter(|&&r| s.sample(r).cluster == ClusterId(c))
                    .count()
            })
            .collect();
        assert_eq!(per, vec![10, 10]);
        assert_eq!(root.pool(), (0..200).collect::<Vec<_>>());
    }

    #[test]
    fn hidden_samples_hang_off_their_nearest_representative() {
        let s = set(150, 4, 3);
        let root = build_root(&s, GridSpec::square(5).unwrap(), 9, PipelineId::Baseline, &cfg()).unwrap();
        for (&rep, hidden) in &root.assigned {
            for &h in hidden {
                let d = dist_sq(s.sample(h).position, s.sample(rep).position);
                for &other in &root.representatives {
                    assert!(d <= dist_sq(s.sample(h).position, s.sample(other).position));
                }
            }
        }
    }

    #[test]
    fn build_root_is_deterministic() {
        let s = set(120, 3, 4);
        let spec = GridSpec::square(7).unwrap();
        let a = build_root(&s, spec, 5, PipelineId::GLT, &cfg()).unwrap();
        let b = build_root(&s, spec, 5, PipelineId::GLT, &cfg()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zoom_stays_inside_the_selection() {
        let s = set(300, 3, 5);
        let spec = GridSpec::square(6).unwrap();
        let root = build_root(&s, spec, 1, PipelineId::G, &cfg()).unwrap();
        let cells: Vec<usize> = (0..spec.capacity())
            .filter(|&c| root.layout().label(c) == Some(ClusterId(1)))
            .collect();
        let child = zoom(&s, &root, &cells, spec, "n1".into(), 2, PipelineId::GLT, &cfg()).unwrap();
        assert_eq!(child.parent.as_deref(), Some("root"));
        let mut allowed: Vec<usize> = Vec::new();
        for &c in &cells {
            let rep = root.sample_at(c).unwrap();
            allowed.push(rep);
            allowed.extend(&root.assigned[&rep]);
            assert!(child.representatives.contains(&rep));
            assert!(child.anchors.contains_key(&rep));
        }
        allowed.sort_unstable();
        assert_eq!(child.pool(), allowed);
        assert_eq!(child.representatives.len(), spec.capacity().min(allowed.len()));
        assert!(validate_layout(child.layout()).is_ok());
        assert!(child.layout().sample_clusters().iter().all(|&c| c == ClusterId(1)));
    }

    #[test]
    fn zoom_on_a_lone_representative() {
        let s = set(20, 2, 6);
        let spec = GridSpec::square(5).unwrap();
        let root = build_root(&s, spec, 0, PipelineId::Baseline, &cfg()).unwrap();
        let cell = root.layout().cell_of(0);
        let child = zoom(
            &s,
            &root,
            &[cell],
            GridSpec::square(3).unwrap(),
            "n1".into(),
            0,
            PipelineId::G,
            &cfg(),
        )
        .unwrap();
        assert_eq!(child.representatives, vec![root.representatives[0]]);
        assert_eq!(child.layout().cell_of(0), 4);
    }

    #[test]
    fn zoom_rejects_bad_selections() {
        let s = set(10, 2, 7);
        let spec = GridSpec::square(4).unwrap();
        let root = build_root(&s, spec, 0, PipelineId::Baseline, &cfg()).unwrap();
        let empty = (0..16).find(|&c| root.layout().sample_at(c).is_none()).unwrap();
        let z = |cells: &[usize], child: GridSpec| zoom(&s, &root, cells, child, "n".into(), 0, PipelineId::G, &cfg());
        assert_eq!(z(&[], spec), Err(Error::EmptySelection));
        assert_eq!(z(&[empty], spec), Err(Error::InvalidSelection(empty)));
        assert_eq!(z(&[99], spec), Err(Error::InvalidSelection(99)));
        let full: Vec<usize> = (0..16).filter(|&c| root.layout().sample_at(c).is_some()).collect();
        assert_eq!(
            z(&full, GridSpec::square(2).unwrap()),
            Err(Error::SelectionTooLarge {
                selected: 10,
                capacity: 4
            })
        );
    }
}
