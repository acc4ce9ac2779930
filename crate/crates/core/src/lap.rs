//! Dense linear assignment (Jonker-Volgenant).
//!
//! The solver runs on integer costs: floating-point inputs are scaled by
//! 2^20 and rounded, with saturation, so that optima do not depend on
//! floating-point tie noise. Column reduction with reduction transfer is
//! followed by shortest augmenting paths for the rows still free; the
//! augmenting row reduction phase is left out.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

const SCALE: f64 = (1u64 << 20) as f64;

/// Square matrix of finite, non-negative costs; rows are agents (samples),
/// columns are tasks (cells).
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n || data.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidCostMatrix);
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidCostMatrix);
        }
        Self::new(n, rows.concat())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.n..(row + 1) * self.n]
    }

    /// Total cost of a row-to-column assignment.
    pub fn total(&self, row_to_col: &[usize]) -> f64 {
        row_to_col.iter().enumerate().map(|(i, &j)| self.get(i, j)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LapSolution {
    /// Column assigned to each row.
    pub row_to_col: Vec<usize>,
    pub total: f64,
}

/// Minimum-cost perfect matching of a square cost matrix.
pub fn solve_lap(cost: &CostMatrix) -> LapSolution {
    let n = cost.n;
    let cap = i64::MAX / (4 * (n as i64 + 1));
    let scaled: Vec<i64> = cost
        .data
        .iter()
        .map(|&c| {
            let s = libm::round(c * SCALE);
            if s >= cap as f64 {
                cap
            } else {
                s as i64
            }
        })
        .collect();
    let row_to_col = solve_integer(n, &scaled);
    let total = cost.total(&row_to_col);
    LapSolution { row_to_col, total }
}

/// Jonker-Volgenant on a row-major `n x n` integer matrix. Returns the column
/// of every row. Entries must be small enough that sums of a few of them do
/// not overflow.
pub fn solve_integer(n: usize, cost: &[i64]) -> Vec<usize> {
    assert_eq!(cost.len(), n * n, "cost matrix must be n x n");
    match n {
        0 => return Vec::new(),
        1 => return vec![0],
        _ => {}
    }
    let mut solver = Jv::new(n, cost);
    for i in solver.column_reduction() {
        solver.augment(i);
    }
    solver.x.into_iter().map(|j| j as usize).collect()
}

const NONE: isize = -1;

struct Jv<'a> {
    n: usize,
    cost: &'a [i64],
    /// Column of each row.
    x: Vec<isize>,
    /// Row of each column.
    y: Vec<isize>,
    /// Column prices.
    v: Vec<i64>,
}

impl<'a> Jv<'a> {
    fn new(n: usize, cost: &'a [i64]) -> Self {
        Self {
            n,
            cost,
            x: vec![NONE; n],
            y: vec![NONE; n],
            v: vec![i64::MAX; n],
        }
    }

    #[inline]
    fn c(&self, i: usize, j: usize) -> i64 {
        self.cost[i * self.n + j]
    }

    /// Column reduction and reduction transfer; returns the free rows.
    fn column_reduction(&mut self) -> Vec<usize> {
        let n = self.n;
        let mut argmin = vec![0usize; n];
        for i in 0..n {
            for j in 0..n {
                let c = self.c(i, j);
                if c < self.v[j] {
                    self.v[j] = c;
                    argmin[j] = i;
                }
            }
        }
        let mut unique = vec![true; n];
        for j in (0..n).rev() {
            let i = argmin[j];
            if self.x[i] == NONE {
                self.x[i] = j as isize;
                self.y[j] = i as isize;
            } else {
                unique[i] = false;
                self.y[j] = NONE;
            }
        }
        let mut free = Vec::new();
        for i in 0..n {
            if self.x[i] == NONE {
                free.push(i);
            } else if unique[i] {
                let j = self.x[i] as usize;
                let min = (0..n)
                    .filter(|&k| k != j)
                    .map(|k| self.c(i, k) - self.v[k])
                    .min()
                    .unwrap_or(0);
                self.v[j] -= min;
            }
        }
        free
    }

    #[allow(clippy::mut_range_bound)]
    fn augment(&mut self, start: usize) {
        let n = self.n;
        let mut d: Vec<i64> = (0..n).map(|j| self.c(start, j) - self.v[j]).collect();
        let mut pred = vec![start; n];
        let mut cols: Vec<usize> = (0..n).collect();
        // cols[..low] are ready, cols[low..up] are at the current minimum
        // distance and waiting to be scanned, cols[up..] are untouched.
        let mut low = 0usize;
        let mut up = 0usize;
        let mut ready = 0usize;
        let mut min = 0i64;
        let end = 'search: loop {
            if low == up {
                ready = low;
                up = low + 1;
                min = d[cols[low]];
                for k in up..n {
                    let j = cols[k];
                    let h = d[j];
                    if h <= min {
                        if h < min {
                            up = low;
                            min = h;
                        }
                        cols[k] = cols[up];
                        cols[up] = j;
                        up += 1;
                    }
                }
                for &j in &cols[low..up] {
                    if self.y[j] == NONE {
                        break 'search j;
                    }
                }
            }
            let j1 = cols[low];
            low += 1;
            let i = self.y[j1] as usize;
            let u1 = self.c(i, j1) - self.v[j1] - min;
            for k in up..n {
                let j = cols[k];
                let h = self.c(i, j) - self.v[j] - u1;
                if h < d[j] {
                    d[j] = h;
                    pred[j] = i;
                    if h == min {
                        if self.y[j] == NONE {
                            break 'search j;
                        }
                        cols[k] = cols[up];
                        cols[up] = j;
                        up += 1;
                    }
                }
            }
        };
        for &j in &cols[..ready] {
            self.v[j] += d[j] - min;
        }
        let mut j = end;
        loop {
            let i = pred[j];
            self.y[j] = i as isize;
            let prev = self.x[i];
            self.x[i] = j as isize;
            if i == start {
                break;
            }
            j = prev as usize;
        }
    }
}
