//! Local phase: greedy swaps of boundary cells between clusters.
//!
//! Each pass visits the boundary cells in a seeded random order. For the
//! visited cell every boundary cell of another cluster is tried as a swap
//! partner, and the partner with the largest gain in mean convexity is taken
//! when that gain is positive. Passes repeat until one accepts nothing.
//!
//! Scores are kept per cluster by a measure-specific [`Scorer`], so trying a
//! swap only re-scores the two clusters involved, and mostly from cached
//! state.

mod board;
mod cut;
mod hull;
mod triple;

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::measures::{check_compatible, convexity, ConvexityMeasure};
use crate::model::{ClusterId, ClusterShape, GridLayout};
use crate::{Error, Result};
use board::Board;

/// Gains at or below this are treated as noise.
pub const GAIN_EPSILON: f64 = 1e-12;
pub const MAX_PASSES: usize = 10;

pub(crate) trait Scorer {
    /// Current score of dense cluster `k`.
    fn score(&self, k: usize) -> f64;
    /// Scores of the clusters of `a` and `b` were their cells exchanged.
    fn evaluate(&mut self, board: &Board, a: usize, b: usize) -> (f64, f64);
    /// Exchanges the owners of `a` and `b` on `board` and updates state.
    fn apply(&mut self, board: &mut Board, a: usize, b: usize);
}

fn scorer_for(m: ConvexityMeasure, board: &Board, clusters: usize) -> Box<dyn Scorer> {
    match m {
        ConvexityMeasure::Area => Box::new(hull::HullScorer::new(board, clusters, false)),
        ConvexityMeasure::Perimeter => Box::new(hull::HullScorer::new(board, clusters, true)),
        ConvexityMeasure::Triple => Box::new(triple::TripleScorer::new(board, clusters)),
        ConvexityMeasure::Cut => Box::new(cut::CutScorer::new(board, clusters)),
    }
}

/// A scored candidate exchange of two cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapCandidate {
    pub cell_a: usize,
    pub cell_b: usize,
    /// Change of the mean convexity over all clusters.
    pub gain: f64,
    /// Change of the squared displacement from the phase input.
    pub prox_penalty: f64,
}

/// One accepted swap, with the layout convexity around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapRecord {
    pub cell_a: usize,
    pub cell_b: usize,
    pub before: f64,
    pub after: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOutcome {
    pub layout: GridLayout,
    pub swaps: usize,
    pub passes: usize,
    pub audit: Vec<SwapRecord>,
}

fn is_boundary(layout: &GridLayout, cell: usize) -> bool {
    match layout.label(cell) {
        None => false,
        Some(k) => layout
            .spec()
            .neighbors8(cell)
            .any(|n| matches!(layout.label(n), Some(o) if o != k)),
    }
}

/// Cells with at least one 8-neighbor labelled with a different cluster, in
/// ascending order. Empty cells are never included.
pub fn boundary_cells(layout: &GridLayout) -> Vec<usize> {
    (0..layout.spec().capacity())
        .filter(|&c| is_boundary(layout, c))
        .collect()
}

fn dist_sq(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1])
}

/// Added squared displacement from `input` when the samples at `a` and `b`
/// trade cells.
fn prox_penalty(layout: &GridLayout, input: &GridLayout, a: usize, b: usize) -> f64 {
    let spec = layout.spec();
    let (ca, cb) = (spec.center(a), spec.center(b));
    let mut delta = 0.0;
    if let Some(s) = layout.sample_at(a) {
        let home = spec.center(input.cell_of(s));
        delta += dist_sq(cb, home) - dist_sq(ca, home);
    }
    if let Some(s) = layout.sample_at(b) {
        let home = spec.center(input.cell_of(s));
        delta += dist_sq(ca, home) - dist_sq(cb, home);
    }
    delta
}

fn cells_of(layout: &GridLayout, k: ClusterId) -> Vec<(usize, usize)> {
    let spec = layout.spec();
    (0..spec.capacity())
        .filter(|&c| layout.label(c) == Some(k))
        .map(|c| spec.coords(c))
        .collect()
}

/// Scores exchanging the contents of boundary cells `a` and `b` by re-scoring
/// the two clusters involved from scratch.
pub fn evaluate_swap(
    layout: &GridLayout,
    a: usize,
    b: usize,
    m: ConvexityMeasure,
    input: &GridLayout,
) -> Result<SwapCandidate> {
    check_compatible(layout, input)?;
    let cap = layout.spec().capacity();
    if a >= cap || b >= cap {
        return Err(Error::InvalidSwap(a, b, "cell out of range"));
    }
    let (Some(ka), Some(kb)) = (layout.label(a), layout.label(b)) else {
        return Err(Error::InvalidSwap(a, b, "empty cell"));
    };
    if ka == kb {
        return Err(Error::InvalidSwap(a, b, "same cluster"));
    }
    if !is_boundary(layout, a) || !is_boundary(layout, b) {
        return Err(Error::InvalidSwap(a, b, "not a boundary cell"));
    }
    let clusters = layout.cluster_ids().len() as f64;
    let mut after = layout.clone();
    after.swap_cells(a, b);
    let score = |l: &GridLayout, k: ClusterId| convexity(&ClusterShape::from_cells(k, cells_of(l, k)), m);
    let delta = (score(&after, ka) - score(layout, ka)) + (score(&after, kb) - score(layout, kb));
    Ok(SwapCandidate {
        cell_a: a,
        cell_b: b,
        gain: delta / clusters,
        prox_penalty: prox_penalty(layout, input, a, b),
    })
}

struct Best {
    cell: usize,
    gain: f64,
    penalty: f64,
}

/// Runs the local phase on `layout` for measure `m`. `input` is the layout
/// the phase started from and only breaks ties between equal gains.
pub fn local_adjust(layout: &GridLayout, m: ConvexityMeasure, seed: u64, input: &GridLayout) -> Result<LocalOutcome> {
    check_compatible(layout, input)?;
    let ids = layout.cluster_ids();
    let spec = layout.spec();
    let cells = spec.capacity();
    let k_total = ids.len();
    let mut board = Board::from_layout(layout, &ids);
    let mut scorer = scorer_for(m, &board, k_total);
    let mut current = layout.clone();
    let mut boundary: Vec<bool> = (0..cells).map(|c| is_boundary(&current, c)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = |s: &dyn Scorer| (0..k_total).map(|k| s.score(k)).sum::<f64>() / k_total.max(1) as f64;

    let mut audit = Vec::new();
    let mut passes = 0;
    while passes < MAX_PASSES {
        passes += 1;
        let mut order: Vec<usize> = (0..cells).filter(|&c| boundary[c]).collect();
        order.shuffle(&mut rng);
        let mut accepted = 0;
        for a in order {
            if !boundary[a] {
                continue;
            }
            let ka = board.owner(a).expect("boundary cells are assigned");
            let mut best: Option<Best> = None;
            for b in 0..cells {
                if !boundary[b] {
                    continue;
                }
                let kb = match board.owner(b) {
                    Some(kb) if kb != ka => kb,
                    _ => continue,
                };
                let (na, nb) = scorer.evaluate(&board, a, b);
                let gain = ((na - scorer.score(ka)) + (nb - scorer.score(kb))) / k_total as f64;
                if gain <= GAIN_EPSILON {
                    continue;
                }
                let penalty = prox_penalty(&current, input, a, b);
                let better = match &best {
                    None => true,
                    Some(cur) if gain > cur.gain + GAIN_EPSILON => true,
                    Some(cur) => (gain - cur.gain).abs() <= GAIN_EPSILON && penalty < cur.penalty,
                };
                if better {
                    best = Some(Best { cell: b, gain, penalty });
                }
            }
            let Some(best) = best else { continue };
            let before = mean(&*scorer);
            scorer.apply(&mut board, a, best.cell);
            current.swap_cells(a, best.cell);
            let after = mean(&*scorer);
            audit.push(SwapRecord {
                cell_a: a,
                cell_b: best.cell,
                before,
                after,
                gain: best.gain,
            });
            accepted += 1;
            for centre in [a, best.cell] {
                boundary[centre] = is_boundary(&current, centre);
                for n in spec.neighbors8(centre) {
                    boundary[n] = is_boundary(&current, n);
                }
            }
        }
        if accepted == 0 {
            break;
        }
    }
    Ok(LocalOutcome {
        swaps: audit.len(),
        layout: current,
        passes,
        audit,
    })
}
