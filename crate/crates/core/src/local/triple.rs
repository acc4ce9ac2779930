//! Incremental triple ratio.
//!
//! For every cluster `A` and every grid cell `x` three counters are kept:
//!
//! * `ends[x]`: lattice centers strictly between `x` and each member of `A`,
//!   i.e. the triples `x` would add to the total as an endpoint;
//! * `inner[x]`: how many of those centers are members of `A`;
//! * `middle[x]`: pairs of members with `x` strictly between them.
//!
//! Adding `p` to `A` then changes the totals by `ends[p]` and
//! `inner[p] + middle[p]`, and every counter can be refreshed after a
//! membership change by walking one line per cell.

use alloc::vec;
use alloc::vec::Vec;

use super::board::Board;
use super::Scorer;
use crate::geometry::gcd;

#[derive(Debug, Clone, Copy, Default)]
struct Counters {
    ends: i64,
    inner: i64,
    middle: i64,
}

pub(crate) struct TripleScorer {
    cells: usize,
    total: Vec<i64>,
    satisfied: Vec<i64>,
    /// `clusters x cells`, row-major.
    counters: Vec<Counters>,
}

#[inline]
fn step(from: (i64, i64), to: (i64, i64)) -> ((i64, i64), i64) {
    let (dx, dy) = (to.0 - from.0, to.1 - from.1);
    let g = gcd(dx.unsigned_abs(), dy.unsigned_abs()) as i64;
    ((dx / g, dy / g), g)
}

/// Members of `k` strictly between `from` and `to`, which are `g` steps of
/// `d` apart.
#[inline]
fn between(board: &Board, k: usize, from: (i64, i64), d: (i64, i64), g: i64) -> i64 {
    (1..g)
        .filter(|&t| board.is(from.0 + t * d.0, from.1 + t * d.1, k))
        .count() as i64
}

/// Members of `k` on the open ray from `origin` in direction `d`.
#[inline]
fn ray(board: &Board, k: usize, origin: (i64, i64), d: (i64, i64)) -> i64 {
    let mut n = 0;
    let (mut c, mut r) = (origin.0 + d.0, origin.1 + d.1);
    while board.inside(c, r) {
        if board.is(c, r, k) {
            n += 1;
        }
        c += d.0;
        r += d.1;
    }
    n
}

impl TripleScorer {
    pub fn new(board: &Board, clusters: usize) -> Self {
        let cells = board.cells();
        let mut scorer = Self {
            cells,
            total: vec![0; clusters],
            satisfied: vec![0; clusters],
            counters: vec![Counters::default(); clusters * cells],
        };
        let mut partial = board.emptied();
        for p in 0..cells {
            if let Some(k) = board.owner(p) {
                scorer.add(&partial, k, p);
                partial.set(p, k);
            }
        }
        scorer
    }

    /// Takes `p` out of cluster `k`; `board` must no longer list `p` in `k`.
    fn remove(&mut self, board: &Board, k: usize, p: usize) {
        self.sweep(board, k, p, -1);
        let c = self.counters[k * self.cells + p];
        self.total[k] -= c.ends;
        self.satisfied[k] -= c.inner + c.middle;
    }

    /// Puts `p` into cluster `k`; `board` must not list `p` in `k` yet.
    fn add(&mut self, board: &Board, k: usize, p: usize) {
        let c = self.counters[k * self.cells + p];
        self.total[k] += c.ends;
        self.satisfied[k] += c.inner + c.middle;
        self.sweep(board, k, p, 1);
    }

    /// Applies `sign * (contribution of p)` to every other cell's counters.
    /// `board` must show cluster `k` without `p`.
    fn sweep(&mut self, board: &Board, k: usize, p: usize, sign: i64) {
        let pc = board.coords(p);
        let base = k * self.cells;
        for x in 0..self.cells {
            if x == p {
                continue;
            }
            let xc = board.coords(x);
            let (d, g) = step(xc, pc);
            let ctr = &mut self.counters[base + x];
            ctr.ends += sign * (g - 1);
            ctr.inner += sign * (between(board, k, xc, d, g) + ray(board, k, pc, d));
            ctr.middle += sign * ray(board, k, xc, (-d.0, -d.1));
        }
    }

    fn ratio(total: i64, satisfied: i64) -> f64 {
        if total == 0 {
            1.0
        } else {
            satisfied as f64 / total as f64
        }
    }

    /// Totals of cluster `k` (containing `out`, not containing `inn`) after
    /// replacing `out` by `inn`.
    fn exchanged(&self, board: &Board, k: usize, out: usize, inn: usize) -> (i64, i64) {
        let base = k * self.cells;
        let co = self.counters[base + out];
        let ci = self.counters[base + inn];
        let (oc, ic) = (board.coords(out), board.coords(inn));
        let (d, g) = step(ic, oc);
        let ends_in = ci.ends - (g - 1);
        let inner_in = ci.inner - between(board, k, ic, d, g) - ray(board, k, oc, d);
        let middle_in = ci.middle - ray(board, k, ic, (-d.0, -d.1));
        let total = self.total[k] - co.ends + ends_in;
        let satisfied = self.satisfied[k] - (co.inner + co.middle) + inner_in + middle_in;
        (total, satisfied)
    }
}

impl Scorer for TripleScorer {
    fn score(&self, k: usize) -> f64 {
        Self::ratio(self.total[k], self.satisfied[k])
    }

    fn evaluate(&mut self, board: &Board, a: usize, b: usize) -> (f64, f64) {
        let ka = board.owner(a).expect("a is assigned");
        let kb = board.owner(b).expect("b is assigned");
        let (ta, sa) = self.exchanged(board, ka, a, b);
        let (tb, sb) = self.exchanged(board, kb, b, a);
        (Self::ratio(ta, sa), Self::ratio(tb, sb))
    }

    fn apply(&mut self, board: &mut Board, a: usize, b: usize) {
        let ka = board.owner(a).expect("a is assigned");
        let kb = board.owner(b).expect("b is assigned");
        board.clear(a);
        self.remove(board, ka, a);
        board.clear(b);
        self.remove(board, kb, b);
        self.add(board, ka, b);
        board.set(b, ka);
        self.add(board, kb, a);
        board.set(a, kb);
    }
}
