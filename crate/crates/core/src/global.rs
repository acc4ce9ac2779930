//! Global phase: the blended proximity/compactness assignment, its adaptive
//! weight, and the projection-to-grid baseline that seeds it.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::lap::{solve_lap, CostMatrix};
use crate::measures::{compactness_raw, proximity_raw};
use crate::model::{ClusterId, GridLayout, GridSpec, SampleSet};
use crate::{Error, Result};

/// Rounds of the center/assignment alternation for a fixed weight.
pub const FIXED_ROUNDS: usize = 10;
pub const DEFAULT_MAX_ITERS: usize = 20;
/// Number of recent assignments checked for repetition.
const CYCLE_WINDOW: usize = 3;

fn dist_sq(a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    dx * dx + dy * dy
}

/// Mean cell center of every cluster present in the layout.
pub fn cluster_centers(layout: &GridLayout) -> BTreeMap<ClusterId, [f64; 2]> {
    let spec = layout.spec();
    let mut acc: BTreeMap<ClusterId, (f64, f64, usize)> = BTreeMap::new();
    for (sample, &cluster) in layout.sample_clusters().iter().enumerate() {
        let [x, y] = spec.center(layout.cell_of(sample));
        let e = acc.entry(cluster).or_insert((0.0, 0.0, 0));
        e.0 += x;
        e.1 += y;
        e.2 += 1;
    }
    acc.into_iter()
        .map(|(c, (x, y, k))| (c, [x / k as f64, y / k as f64]))
        .collect()
}

/// Places arbitrary points (already in cell units) onto distinct cells by
/// minimizing total squared distance to the cell centers.
pub fn assign_positions(spec: GridSpec, positions: &[[f64; 2]], clusters: Vec<ClusterId>) -> Result<GridLayout> {
    let cells = spec.capacity();
    if positions.len() > cells {
        return Err(Error::TooManySamples {
            samples: positions.len(),
            cells,
        });
    }
    let mut data = alloc::vec![0.0; cells * cells];
    for (i, &p) in positions.iter().enumerate() {
        for j in 0..cells {
            data[i * cells + j] = dist_sq(p, spec.center(j));
        }
    }
    let solution = solve_lap(&CostMatrix::new(cells, data)?);
    let cell_of = solution.row_to_col[..positions.len()].to_vec();
    GridLayout::new(spec, cell_of, clusters)
}

/// Min-max scales projected positions onto the span of cell centers (a
/// constant axis maps to the grid's middle) and solves the resulting
/// assignment problem.
pub fn baseline_grid_from_projection(samples: &SampleSet, spec: GridSpec) -> Result<GridLayout> {
    if samples.len() > spec.capacity() {
        return Err(Error::TooManySamples {
            samples: samples.len(),
            cells: spec.capacity(),
        });
    }
    let positions = samples.positions();
    let scaled = scale_into_grid(&positions, spec);
    assign_positions(spec, &scaled, samples.clusters())
}

pub(crate) fn scale_into_grid(positions: &[[f64; 2]], spec: GridSpec) -> Vec<[f64; 2]> {
    let extent = [spec.width() as f64, spec.height() as f64];
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in positions {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    positions
        .iter()
        .map(|p| {
            let mut out = [0.0; 2];
            for k in 0..2 {
                let span = hi[k] - lo[k];
                out[k] = if span > 0.0 {
                    0.5 + (p[k] - lo[k]) / span * (extent[k] - 1.0)
                } else {
                    extent[k] / 2.0
                };
            }
            out
        })
        .collect()
}

/// Blended cost of putting sample `i` (row) into cell `j` (column):
/// `lambda |v_j - v_i|^2 + (1 - lambda) |v_j - mu_i|^2`, where `v_i` is the
/// sample's cell in `input` and `mu_i` its cluster center. Rows past the
/// sample count are zero-cost padding for empty cells.
pub fn build_cost_matrix(
    input: &GridLayout,
    centers: &BTreeMap<ClusterId, [f64; 2]>,
    lambda: f64,
) -> Result<CostMatrix> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidLambda(lambda));
    }
    let spec = input.spec();
    let cells = spec.capacity();
    let cell_centers: Vec<[f64; 2]> = (0..cells).map(|j| spec.center(j)).collect();
    let mut data = alloc::vec![0.0; cells * cells];
    for (i, cluster) in input.sample_clusters().iter().enumerate() {
        let mu = *centers.get(cluster).ok_or(Error::MissingClusterCenter(cluster.0))?;
        let vi = cell_centers[input.cell_of(i)];
        let row = &mut data[i * cells..(i + 1) * cells];
        for (c, vj) in row.iter_mut().zip(&cell_centers) {
            *c = lambda * dist_sq(*vj, vi) + (1.0 - lambda) * dist_sq(*vj, mu);
        }
    }
    CostMatrix::new(cells, data)
}

/// How the proximity/compactness weight is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMode {
    Adaptive,
    Fixed(f64),
}

/// One adaptive iteration: the weight used and the scores it produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaStep {
    pub lambda: f64,
    pub prox2: f64,
    pub comp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSchedule {
    pub mode: LambdaMode,
    pub max_iters: usize,
    pub history: Vec<LambdaStep>,
}

impl LambdaSchedule {
    pub fn adaptive() -> Self {
        Self::new(LambdaMode::Adaptive)
    }

    pub fn fixed(lambda: f64) -> Self {
        Self::new(LambdaMode::Fixed(lambda))
    }

    pub fn new(mode: LambdaMode) -> Self {
        Self {
            mode,
            max_iters: DEFAULT_MAX_ITERS,
            history: Vec::new(),
        }
    }
}

/// A score at the current layout and at the two anchor layouts (the input,
/// optimal for proximity, and the compactness-only solution).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchored {
    pub current: f64,
    pub at_proximity_optimum: f64,
    pub at_compactness_optimum: f64,
}

/// Gives more weight to whichever objective is further from its optimum:
/// `lambda = dP / (dP + dC)` with both progress terms normalized by the gap
/// between the anchors, clamped to `[0, 1]`.
pub fn compute_lambda(prox: Anchored, comp: Anchored) -> Result<f64> {
    let prox_gap = prox.at_compactness_optimum - prox.at_proximity_optimum;
    let comp_gap = comp.at_proximity_optimum - comp.at_compactness_optimum;
    if !(prox_gap > 0.0 && comp_gap > 0.0) {
        return Err(Error::AnchorsCoincide);
    }
    let dp = ((prox.current - prox.at_proximity_optimum) / prox_gap).max(0.0);
    let dc = ((comp.current - comp.at_compactness_optimum) / comp_gap).max(0.0);
    if dp + dc <= 0.0 {
        return Err(Error::AnchorsCoincide);
    }
    Ok((dp / (dp + dc)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalOutcome {
    pub layout: GridLayout,
    /// Assignment problems solved in total.
    pub lap_solves: usize,
    /// Solves spent on the compactness-only anchor (adaptive mode only).
    pub anchor_solves: usize,
    /// Solves in the weighted loop itself.
    pub loop_solves: usize,
    /// Whether the loop stopped on a repeated assignment rather than its cap.
    pub converged: bool,
}

fn solve_step(input: &GridLayout, current: &GridLayout, lambda: f64) -> Result<GridLayout> {
    let centers = cluster_centers(current);
    let cost = build_cost_matrix(input, &centers, lambda)?;
    let solution = solve_lap(&cost);
    input.with_cells(solution.row_to_col[..input.sample_count()].to_vec())
}

/// Alternates center recomputation and assignment at a fixed weight until the
/// assignment stops changing or the round cap is hit.
fn fixed_loop(input: &GridLayout, lambda: f64) -> Result<(GridLayout, usize, bool)> {
    let mut current = input.clone();
    let mut solves = 0;
    for _ in 0..FIXED_ROUNDS {
        let next = solve_step(input, &current, lambda)?;
        solves += 1;
        let unchanged = next == current;
        current = next;
        if unchanged {
            return Ok((current, solves, true));
        }
    }
    Ok((current, solves, false))
}

/// Runs the global phase from `input` (the proximity reference).
pub fn global_assignment(input: &GridLayout, schedule: &mut LambdaSchedule) -> Result<GlobalOutcome> {
    match schedule.mode {
        LambdaMode::Fixed(lambda) => {
            if !(0.0..=1.0).contains(&lambda) {
                return Err(Error::InvalidLambda(lambda));
            }
            let (layout, solves, converged) = fixed_loop(input, lambda)?;
            schedule.history.push(LambdaStep {
                lambda,
                prox2: proximity_raw(&layout, input)?,
                comp: compactness_raw(&layout),
            });
            Ok(GlobalOutcome {
                layout,
                lap_solves: solves,
                anchor_solves: 0,
                loop_solves: solves,
                converged,
            })
        }
        LambdaMode::Adaptive => adaptive(input, schedule),
    }
}

fn adaptive(input: &GridLayout, schedule: &mut LambdaSchedule) -> Result<GlobalOutcome> {
    let (compact, anchor_solves, _) = fixed_loop(input, 0.0)?;
    let prox_p = 0.0;
    let comp_p = compactness_raw(input);
    let prox_c = proximity_raw(&compact, input)?;
    let comp_c = compactness_raw(&compact);

    let mut lambda = 0.5;
    let mut current = input.clone();
    let mut recent: Vec<Vec<usize>> = alloc::vec![input.assignment().cell_of().to_vec()];
    let mut loop_solves = 0;
    let mut converged = false;
    while loop_solves < schedule.max_iters {
        let next = solve_step(input, &current, lambda)?;
        loop_solves += 1;
        let prox = proximity_raw(&next, input)?;
        let comp = compactness_raw(&next);
        schedule.history.push(LambdaStep {
            lambda,
            prox2: prox,
            comp,
        });
        let cells = next.assignment().cell_of().to_vec();
        current = next;
        if recent.contains(&cells) {
            converged = true;
            break;
        }
        if recent.len() == CYCLE_WINDOW {
            recent.remove(0);
        }
        recent.push(cells);
        lambda = compute_lambda(
            Anchored {
                current: prox,
                at_proximity_optimum: prox_p,
                at_compactness_optimum: prox_c,
            },
            Anchored {
                current: comp,
                at_proximity_optimum: comp_p,
                at_compactness_optimum: comp_c,
            },
        )
        .unwrap_or(0.5);
    }
    Ok(GlobalOutcome {
        layout: current,
        lap_solves: anchor_solves + loop_solves,
        anchor_solves,
        loop_solves,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SampleRecord;
    use alloc::string::ToString;
    use alloc::vec;
    use itertools::Itertools;

    fn ids(v: &[u32]) -> Vec<ClusterId> {
        v.iter().map(|&c| ClusterId(c)).collect()
    }

    fn samples(points: &[(f64, f64, &str)]) -> SampleSet {
        let records = points
            .iter()
            .enumerate()
            .map(|(i, &(x, y, c))| SampleRecord {
                id: alloc::format!("s{i}"),
                x,
                y,
                cluster: c.to_string(),
                meta: Default::default(),
            })
            .collect();
        SampleSet::new(records, None).unwrap()
    }

    #[test]
    fn centers() {
        let spec = GridSpec::new(3, 2).unwrap();
        let l = GridLayout::new(spec, vec![0], ids(&[0])).unwrap();
        assert_eq!(cluster_centers(&l)[&ClusterId(0)], [0.5, 0.5]);
        let l = GridLayout::new(spec, vec![0, 1, 3, 4], ids(&[0; 4])).unwrap();
        assert_eq!(cluster_centers(&l)[&ClusterId(0)], [1.0, 1.0]);
        let l = GridLayout::new(spec, vec![0, 2], ids(&[0, 0])).unwrap();
        assert_eq!(cluster_centers(&l)[&ClusterId(0)], [1.5, 0.5]);
    }

    #[test]
    fn baseline_keeps_samples_on_their_cells() {
        let s = samples(&[(0.5, 0.5, "a"), (1.5, 0.5, "a"), (0.5, 1.5, "b"), (1.5, 1.5, "b")]);
        let l = baseline_grid_from_projection(&s, GridSpec::new(2, 2).unwrap()).unwrap();
        assert_eq!(l.assignment().cell_of(), &[0, 1, 2, 3]);
    }

    #[test]
    fn baseline_uncrosses_two_samples() {
        let s = samples(&[(1.0, 0.0, "a"), (0.0, 0.0, "b")]);
        let l = baseline_grid_from_projection(&s, GridSpec::new(2, 1).unwrap()).unwrap();
        assert_eq!(l.assignment().cell_of(), &[1, 0]);
    }

    #[test]
    fn baseline_rejects_overfull_grid() {
        let s = samples(&[(0.0, 0.0, "a"), (1.0, 0.0, "a")]);
        assert!(matches!(
            baseline_grid_from_projection(&s, GridSpec::new(1, 1).unwrap()),
            Err(Error::TooManySamples { .. })
        ));
    }

    #[test]
    fn cost_matrix_reduces_to_each_objective() {
        let spec = GridSpec::new(2, 1).unwrap();
        let input = GridLayout::new(spec, vec![0, 1], ids(&[0, 0])).unwrap();
        let centers = cluster_centers(&input);
        let prox = build_cost_matrix(&input, &centers, 1.0).unwrap();
        assert_eq!(prox.row(0), &[0.0, 1.0]);
        assert_eq!(prox.row(1), &[1.0, 0.0]);
        let comp = build_cost_matrix(&input, &centers, 0.0).unwrap();
        assert_eq!(comp.row(0), &[0.25, 0.25]);
        // lambda = 0.5: 0.5 * {0, 1} + 0.5 * 0.25.
        let mixed = build_cost_matrix(&input, &centers, 0.5).unwrap();
        assert_eq!(mixed.row(0), &[0.125, 0.625]);
        assert_eq!(mixed.row(1), &[0.625, 0.125]);
        assert_eq!(
            build_cost_matrix(&input, &BTreeMap::new(), 0.5),
            Err(Error::MissingClusterCenter(0))
        );
        assert_eq!(build_cost_matrix(&input, &centers, 1.5), Err(Error::InvalidLambda(1.5)));
    }

    #[test]
    fn lambda_extremes() {
        let a = |current, p, c| Anchored {
            current,
            at_proximity_optimum: p,
            at_compactness_optimum: c,
        };
        assert_eq!(compute_lambda(a(0.0, 0.0, 10.0), a(5.0, 5.0, 1.0)).unwrap(), 0.0);
        assert_eq!(compute_lambda(a(10.0, 0.0, 10.0), a(1.0, 5.0, 1.0)).unwrap(), 1.0);
        assert_eq!(compute_lambda(a(5.0, 0.0, 10.0), a(3.0, 5.0, 1.0)).unwrap(), 0.5);
        assert_eq!(
            compute_lambda(a(0.0, 0.0, 0.0), a(5.0, 5.0, 1.0)),
            Err(Error::AnchorsCoincide)
        );
    }

    #[test]
    fn fixed_one_is_identity() {
        let spec = GridSpec::new(3, 3).unwrap();
        let input = GridLayout::new(spec, vec![4, 0, 8, 2, 6, 1], ids(&[0, 1, 0, 1, 0, 1])).unwrap();
        let out = global_assignment(&input, &mut LambdaSchedule::fixed(1.0)).unwrap();
        assert_eq!(out.layout, input);
        assert_eq!(out.lap_solves, 1);
    }

    #[test]
    fn fixed_zero_reaches_exhaustive_compactness_optimum() {
        let spec = GridSpec::new(4, 2).unwrap();
        // Columns alternate between the two clusters.
        let input = GridLayout::new(spec, (0..8).collect(), ids(&[0, 1, 0, 1, 0, 1, 0, 1])).unwrap();
        let out = global_assignment(&input, &mut LambdaSchedule::fixed(0.0)).unwrap();
        let best = (0..8)
            .permutations(8)
            .map(|p| compactness_raw(&input.with_cells(p).unwrap()))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(compactness_raw(&out.layout), best);
    }

    #[test]
    fn coinciding_centers_are_a_fixed_point() {
        // Both diagonals of a 2x2 grid share the center (1, 1), so every
        // assignment has the same frozen-center cost and the loop stops.
        let spec = GridSpec::new(2, 2).unwrap();
        let input = GridLayout::new(spec, vec![0, 3, 1, 2], ids(&[0, 0, 1, 1])).unwrap();
        let out = global_assignment(&input, &mut LambdaSchedule::fixed(0.0)).unwrap();
        assert!(out.lap_solves <= 2);
        assert_eq!(compactness_raw(&out.layout), 2.0);
    }
}
