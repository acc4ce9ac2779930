use alloc::vec;
use alloc::vec::Vec;

use crate::model::{ClusterId, GridLayout, GridSpec};

const VACANT: u32 = u32::MAX;

/// Cell ownership by dense cluster index, mutated cell by cell while a swap is
/// applied so scorers always see the set they are being updated against.
#[derive(Debug, Clone)]
pub(crate) struct Board {
    pub w: usize,
    pub h: usize,
    owner: Vec<u32>,
}

impl Board {
    pub fn empty(spec: GridSpec) -> Self {
        Self {
            w: spec.width(),
            h: spec.height(),
            owner: vec![VACANT; spec.capacity()],
        }
    }

    /// Ownership taken from a layout, with clusters renumbered densely in
    /// ascending id order.
    pub fn from_layout(layout: &GridLayout, ids: &[ClusterId]) -> Self {
        let mut board = Self::empty(layout.spec());
        for (cell, label) in layout.labels().iter().enumerate() {
            if let Some(id) = label {
                let k = ids.binary_search(id).expect("label of a present cluster");
                board.set(cell, k);
            }
        }
        board
    }

    /// Same dimensions, no owners.
    pub fn emptied(&self) -> Self {
        Self {
            w: self.w,
            h: self.h,
            owner: vec![VACANT; self.owner.len()],
        }
    }

    pub fn cells(&self) -> usize {
        self.owner.len()
    }

    #[inline]
    pub fn owner(&self, cell: usize) -> Option<usize> {
        let k = self.owner[cell];
        (k != VACANT).then_some(k as usize)
    }

    #[inline]
    pub fn set(&mut self, cell: usize, k: usize) {
        self.owner[cell] = k as u32;
    }

    #[inline]
    pub fn clear(&mut self, cell: usize) {
        self.owner[cell] = VACANT;
    }

    #[inline]
    pub fn coords(&self, cell: usize) -> (i64, i64) {
        ((cell % self.w) as i64, (cell / self.w) as i64)
    }

    #[inline]
    pub fn inside(&self, c: i64, r: i64) -> bool {
        c >= 0 && r >= 0 && (c as usize) < self.w && (r as usize) < self.h
    }

    #[inline]
    pub fn index(&self, c: i64, r: i64) -> usize {
        r as usize * self.w + c as usize
    }

    /// Whether `(c, r)` is inside the grid and owned by `k`.
    #[inline]
    pub fn is(&self, c: i64, r: i64, k: usize) -> bool {
        self.inside(c, r) && self.owner[self.index(c, r)] == k as u32
    }
}
