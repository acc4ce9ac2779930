//! Cut ratio from per-row and per-column tallies.
//!
//! A unit boundary edge on the lower side of a member in row `r` sees the
//! members in rows `>= r` on its interior side, an edge on the upper side the
//! members in rows `<= r`; columns work the same way. So the score of a
//! cluster follows from member counts and exposed-side counts per row and
//! column, and a swap only touches the tallies around its two cells.

use alloc::vec;
use alloc::vec::Vec;

use super::board::Board;
use super::Scorer;

#[derive(Debug, Clone, Default)]
struct Tally {
    rows: Vec<i64>,
    cols: Vec<i64>,
    /// Exposed lower / upper sides per row.
    down: Vec<i64>,
    up: Vec<i64>,
    /// Exposed left / right sides per column.
    left: Vec<i64>,
    right: Vec<i64>,
}

impl Tally {
    fn new(w: usize, h: usize) -> Self {
        Self {
            rows: vec![0; h],
            cols: vec![0; w],
            down: vec![0; h],
            up: vec![0; h],
            left: vec![0; w],
            right: vec![0; w],
        }
    }

    fn copy_from(&mut self, other: &Tally) {
        self.rows.copy_from_slice(&other.rows);
        self.cols.copy_from_slice(&other.cols);
        self.down.copy_from_slice(&other.down);
        self.up.copy_from_slice(&other.up);
        self.left.copy_from_slice(&other.left);
        self.right.copy_from_slice(&other.right);
    }

    /// Adds `sign` times the contribution of a member at `(c, r)` whose
    /// neighbours' membership is given by `member`.
    fn account(&mut self, c: i64, r: i64, sign: i64, member: impl Fn(i64, i64) -> bool) {
        let (cu, ru) = (c as usize, r as usize);
        self.rows[ru] += sign;
        self.cols[cu] += sign;
        self.down[ru] += sign * i64::from(!member(c, r - 1));
        self.up[ru] += sign * i64::from(!member(c, r + 1));
        self.left[cu] += sign * i64::from(!member(c - 1, r));
        self.right[cu] += sign * i64::from(!member(c + 1, r));
    }

    fn ratio(&self) -> f64 {
        let size: i64 = self.rows.iter().sum();
        let (mut num, mut edges) = (0i64, 0i64);
        axis(&self.rows, &self.down, &self.up, &mut num, &mut edges);
        axis(&self.cols, &self.left, &self.right, &mut num, &mut edges);
        if edges == 0 {
            return 1.0;
        }
        num as f64 / (size as f64 * edges as f64)
    }
}

/// Accumulates interior counts along one axis: `low[i]` edges see members at
/// `>= i`, `high[i]` edges see members at `<= i`.
fn axis(counts: &[i64], low: &[i64], high: &[i64], num: &mut i64, edges: &mut i64) {
    let total: i64 = counts.iter().sum();
    let mut below = 0;
    for i in 0..counts.len() {
        let upto = below + counts[i];
        *num += low[i] * (total - below) + high[i] * upto;
        *edges += low[i] + high[i];
        below = upto;
    }
}

pub(crate) struct CutScorer {
    tallies: Vec<Tally>,
    scratch: Tally,
    scores: Vec<f64>,
}

impl CutScorer {
    pub fn new(board: &Board, clusters: usize) -> Self {
        let mut scorer = Self {
            tallies: vec![Tally::new(board.w, board.h); clusters],
            scratch: Tally::new(board.w, board.h),
            scores: vec![1.0; clusters],
        };
        for k in 0..clusters {
            scorer.rebuild(board, k);
        }
        scorer
    }

    fn rebuild(&mut self, board: &Board, k: usize) {
        let mut t = Tally::new(board.w, board.h);
        for cell in 0..board.cells() {
            if board.owner(cell) == Some(k) {
                let (c, r) = board.coords(cell);
                t.account(c, r, 1, |x, y| board.is(x, y, k));
            }
        }
        self.scores[k] = t.ratio();
        self.tallies[k] = t;
    }

    /// Score of cluster `k` once member `out` is replaced by `inn`.
    fn exchanged(&mut self, board: &Board, k: usize, out: usize, inn: usize) -> f64 {
        let (oc, ic) = (board.coords(out), board.coords(inn));
        let before = |x: i64, y: i64| board.is(x, y, k);
        let after = |x: i64, y: i64| (x, y) == ic || ((x, y) != oc && board.is(x, y, k));
        let mut touched: Vec<(i64, i64)> = Vec::with_capacity(10);
        for (c, r) in [oc, ic] {
            for p in [(c, r), (c - 1, r), (c + 1, r), (c, r - 1), (c, r + 1)] {
                if board.inside(p.0, p.1) && !touched.contains(&p) {
                    touched.push(p);
                }
            }
        }
        let t = &mut self.scratch;
        t.copy_from(&self.tallies[k]);
        for &(c, r) in &touched {
            if before(c, r) {
                t.account(c, r, -1, before);
            }
            if after(c, r) {
                t.account(c, r, 1, after);
            }
        }
        t.ratio()
    }
}

impl Scorer for CutScorer {
    fn score(&self, k: usize) -> f64 {
        self.scores[k]
    }

    fn evaluate(&mut self, board: &Board, a: usize, b: usize) -> (f64, f64) {
        let ka = board.owner(a).expect("a is assigned");
        let kb = board.owner(b).expect("b is assigned");
        (self.exchanged(board, ka, a, b), self.exchanged(board, kb, b, a))
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
