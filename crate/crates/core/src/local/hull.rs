//! Area and perimeter ratios, both of which only need the convex hull of a
//! cluster, its size and its count of 4-adjacent member pairs.

use alloc::vec;
use alloc::vec::Vec;

use super::board::Board;
use super::Scorer;
use crate::geometry::{bridge_length, components, hull_vertices, ring_perimeter, twice_signed_area, Point};
use crate::measures::perimeter_score;

#[derive(Debug, Clone, Copy)]
struct Span {
    count: u32,
    lo: u32,
    hi: u32,
}

const NO_SPAN: Span = Span { count: 0, lo: 0, hi: 0 };

pub(crate) struct HullScorer {
    perimeter: bool,
    size: Vec<i64>,
    adj: Vec<i64>,
    /// Bridge length joining each cluster's components (perimeter only).
    bridge: Vec<f64>,
    /// Whether each cluster is 4-connected (perimeter only).
    connected: Vec<bool>,
    /// `clusters x rows`.
    spans: Vec<Span>,
    hulls: Vec<Vec<Point>>,
    /// Per cluster, a stamp drawn from `clock` at its last rebuild.
    version: Vec<u64>,
    clock: u64,
    /// Hull of the visited cell's cluster without it, keyed by cell and version.
    visit: Option<(usize, u64, Vec<Point>)>,
    /// Per cell: hull of its owner without it, with the owner's version.
    without: Vec<Option<(u64, Vec<Point>)>>,
    scores: Vec<f64>,
}

fn corners(board: &Board, cell: usize) -> [Point; 4] {
    let (c, r) = board.coords(cell);
    [
        Point::new(c, r),
        Point::new(c + 1, r),
        Point::new(c, r + 1),
        Point::new(c + 1, r + 1),
    ]
}

/// Whether `p` lies in the closed counterclockwise convex polygon `hull`.
fn contains(hull: &[Point], p: Point) -> bool {
    hull.len() >= 3
        && (0..hull.len()).all(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
            (b - a).cross(p - a) >= 0
        })
}

/// Hull of `base` plus the unit square at `cell`.
fn with_cell(board: &Board, base: &[Point], cell: usize) -> Vec<Point> {
    let sq = corners(board, cell);
    if sq.iter().all(|&p| contains(base, p)) {
        return base.to_vec();
    }
    let mut points = base.to_vec();
    points.extend_from_slice(&sq);
    hull_vertices(points)
}

fn neighbours4(board: &Board, cell: usize) -> impl Iterator<Item = (i64, i64)> {
    let (c, r) = board.coords(cell);
    [(c - 1, r), (c + 1, r), (c, r - 1), (c, r + 1)].into_iter()
}

/// Whether the 4-neighbours of `cell` in cluster `k` stay 4-connected through
/// the eight cells around it, which keeps the whole cluster connected once
/// `cell` is removed.
fn removal_keeps_connected(board: &Board, k: usize, cell: usize) -> bool {
    let (c, r) = board.coords(cell);
    // Ring order alternates edge and corner neighbours, so ring-consecutive
    // cells are 4-adjacent.
    const RING: [(i64, i64); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
    let member: [bool; 8] = core::array::from_fn(|i| board.is(c + RING[i].0, r + RING[i].1, k));
    let Some(start) = (0..8).find(|&i| !member[i]) else {
        return true;
    };
    let mut runs_with_edge = 0;
    let mut in_run = false;
    let mut has_edge = false;
    for step in 1..=8 {
        let i = (start + step) % 8;
        if member[i] {
            in_run = true;
            has_edge |= i % 2 == 0;
        } else if in_run {
            runs_with_edge += usize::from(has_edge);
            in_run = false;
            has_edge = false;
        }
    }
    runs_with_edge <= 1
}

impl HullScorer {
    pub fn new(board: &Board, clusters: usize, perimeter: bool) -> Self {
        let mut scorer = Self {
            perimeter,
            size: vec![0; clusters],
            adj: vec![0; clusters],
            bridge: vec![0.0; clusters],
            connected: vec![true; clusters],
            spans: vec![NO_SPAN; clusters * board.h],
            hulls: vec![Vec::new(); clusters],
            version: vec![0; clusters],
            clock: 0,
            visit: None,
            without: vec![None; board.cells()],
            scores: vec![1.0; clusters],
        };
        for k in 0..clusters {
            scorer.rebuild(board, k);
        }
        scorer
    }

    fn rebuild(&mut self, board: &Board, k: usize) {
        let (mut size, mut adj) = (0, 0);
        for r in 0..board.h {
            let mut span = NO_SPAN;
            for c in 0..board.w {
                let cell = r * board.w + c;
                if board.owner(cell) != Some(k) {
                    continue;
                }
                if span.count == 0 {
                    span.lo = c as u32;
                }
                span.count += 1;
                span.hi = c as u32;
                size += 1;
                let (ci, ri) = (c as i64, r as i64);
                adj += i64::from(board.is(ci + 1, ri, k)) + i64::from(board.is(ci, ri + 1, k));
            }
            self.spans[k * board.h + r] = span;
        }
        self.size[k] = size;
        self.adj[k] = adj;
        if self.perimeter {
            let cells = self.members(board, k, None);
            self.connected[k] = components(&cells).len() <= 1;
            self.bridge[k] = bridge_length(&cells);
        }
        let hull = self.hull_from_spans(board, k, None);
        self.scores[k] = self.rate(&hull, size, adj, self.bridge[k]);
        self.hulls[k] = hull;
        self.clock += 1;
        self.version[k] = self.clock;
    }

    /// Hull from the row extremes of cluster `k`, optionally leaving out one
    /// member cell.
    fn hull_from_spans(&self, board: &Board, k: usize, skip: Option<usize>) -> Vec<Point> {
        let skip_at = skip.map(|s| board.coords(s));
        let mut points = Vec::with_capacity(4 * board.h);
        for r in 0..board.h {
            let span = self.spans[k * board.h + r];
            let (mut lo, mut hi, mut count) = (span.lo as i64, span.hi as i64, span.count);
            if let Some((sc, sr)) = skip_at {
                if sr == r as i64 {
                    count -= 1;
                    if count > 0 && sc == lo {
                        lo = (sc + 1..=hi).find(|&c| board.is(c, sr, k)).unwrap_or(hi);
                    }
                    if count > 0 && sc == hi {
                        hi = (lo..sc).rev().find(|&c| board.is(c, sr, k)).unwrap_or(lo);
                    }
                }
            }
            if count == 0 {
                continue;
            }
            let r = r as i64;
            points.extend_from_slice(&[
                Point::new(lo, r),
                Point::new(lo, r + 1),
                Point::new(hi + 1, r),
                Point::new(hi + 1, r + 1),
            ]);
        }
        hull_vertices(points)
    }

    fn hull_without(&self, board: &Board, k: usize, cell: usize) -> Vec<Point> {
        let hull = &self.hulls[k];
        if corners(board, cell).iter().any(|p| hull.contains(p)) {
            self.hull_from_spans(board, k, Some(cell))
        } else {
            hull.clone()
        }
    }

    /// Member cells of `k`, optionally with `out` replaced by `inn`.
    fn members(&self, board: &Board, k: usize, swap: Option<(usize, usize)>) -> Vec<(usize, usize)> {
        let mut cells = Vec::with_capacity(self.size[k] as usize);
        for cell in 0..board.cells() {
            let member = match swap {
                Some((out, _)) if cell == out => false,
                Some((_, inn)) if cell == inn => true,
                _ => board.owner(cell) == Some(k),
            };
            if member {
                cells.push((cell % board.w, cell / board.w));
            }
        }
        cells
    }

    /// Bridge length of `k` once member `out` is replaced by `inn`. For a
    /// connected cluster whose `out` is not a cut cell the remainder stays
    /// connected, and `inn` is either attached to it or a lone cell whose
    /// bridge is its gap to the remainder.
    fn bridge_exchanged(&self, board: &Board, k: usize, out: usize, inn: usize) -> f64 {
        if self.connected[k] && self.size[k] > 1 && removal_keeps_connected(board, k, out) {
            return self.gap_to_rest(board, k, out, inn);
        }
        bridge_length(&self.members(board, k, Some((out, inn))))
    }

    /// Gap between the cell `inn` and cluster `k` without `out`.
    fn gap_to_rest(&self, board: &Board, k: usize, out: usize, inn: usize) -> f64 {
        let (ci, ri) = board.coords(inn);
        let (co, ro) = board.coords(out);
        let member = |c: i64, r: i64| (c, r) != (co, ro) && board.is(c, r, k);
        let mut best = f64::INFINITY;
        // Rows in order of distance from `inn`, stopping once no row can
        // beat the best gap found.
        for d in 0..board.h as i64 {
            let dy = (d - 1).max(0) as f64;
            if dy >= best {
                break;
            }
            let rows = if d == 0 { [ri, -1] } else { [ri - d, ri + d] };
            for r in rows {
                if r < 0 || r >= board.h as i64 {
                    continue;
                }
                let span = self.spans[k * board.h + r as usize];
                if span.count == 0 {
                    continue;
                }
                let (lo, hi) = (span.lo as i64, span.hi as i64);
                // Nearest member column on each side of `inn`.
                let left = (lo..=ci.min(hi)).rev().find(|&c| member(c, r));
                let right = (ci.max(lo)..=hi).find(|&c| member(c, r));
                for c in left.into_iter().chain(right) {
                    let dx = ((c - ci).abs() - 1).max(0) as f64;
                    best = best.min(libm::sqrt(dx * dx + dy * dy));
                }
            }
        }
        best
    }

    fn rate(&self, hull: &[Point], size: i64, adj: i64, bridge: f64) -> f64 {
        if self.perimeter {
            perimeter_score(ring_perimeter(hull), (4 * size - 2 * adj) as u64, bridge)
        } else {
            2.0 * size as f64 / twice_signed_area(hull) as f64
        }
    }

    /// 4-adjacent member pairs of `k` once `out` is replaced by `inn`.
    fn adj_exchanged(&self, board: &Board, k: usize, out: usize, inn: usize) -> i64 {
        let lost = neighbours4(board, out).filter(|&(c, r)| board.is(c, r, k)).count();
        let oc = board.coords(out);
        let gained = neighbours4(board, inn)
            .filter(|&(c, r)| board.is(c, r, k) && (c, r) != oc)
            .count();
        self.adj[k] - lost as i64 + gained as i64
    }

    fn cached_without(&mut self, board: &Board, k: usize, cell: usize) -> &[Point] {
        let v = self.version[k];
        let fresh = matches!(&self.without[cell], Some((cv, _)) if *cv == v);
        if !fresh {
            let hull = self.hull_without(board, k, cell);
            self.without[cell] = Some((v, hull));
        }
        &self.without[cell].as_ref().expect("just filled").1
    }
}

impl Scorer for HullScorer {
    fn score(&self, k: usize) -> f64 {
        self.scores[k]
    }

    fn evaluate(&mut self, board: &Board, a: usize, b: usize) -> (f64, f64) {
        let ka = board.owner(a).expect("a is assigned");
        let kb = board.owner(b).expect("b is assigned");
        let va = self.version[ka];
        if !matches!(&self.visit, Some((cell, v, _)) if *cell == a && *v == va) {
            let hull = self.hull_without(board, ka, a);
            self.visit = Some((a, va, hull));
        }
        let hull_a = {
            let base = &self.visit.as_ref().expect("just filled").2;
            with_cell(board, base, b)
        };
        let hull_b = {
            let base = self.cached_without(board, kb, b);
            with_cell(board, base, a)
        };
        let adj_a = self.adj_exchanged(board, ka, a, b);
        let adj_b = self.adj_exchanged(board, kb, b, a);
        let (bridge_a, bridge_b) = if self.perimeter {
            (
                self.bridge_exchanged(board, ka, a, b),
                self.bridge_exchanged(board, kb, b, a),
            )
        } else {
            (0.0, 0.0)
        };
        (
            self.rate(&hull_a, self.size[ka], adj_a, bridge_a),
            self.rate(&hull_b, self.size[kb], adj_b, bridge_b),
        )
    }

    fn apply(&mut self, board: &mut Board, a: usize, b: usize) {
        let ka = board.owner(a).expect("a is assigned");
        let kb = board.owner(b).expect("b is assigned");
        board.set(a, kb);
        board.set(b, ka);
        self.rebuild(board, ka);
        self.rebuild(board, kb);
    }
}
