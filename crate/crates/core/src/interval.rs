//! Subset intervals `[B, T] = { N : B ⊆ N ⊆ T }`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::VertexSet;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub bottom: VertexSet,
    pub top: VertexSet,
}

impl Interval {
    pub const fn new(bottom: VertexSet, top: VertexSet) -> Self {
        Interval { bottom, top }
    }

    /// The interval holding exactly one set.
    pub const fn single(set: VertexSet) -> Self {
        Interval { bottom: set, top: set }
    }

    /// An interval is empty when its bottom is not inside its top.
    pub const fn is_empty(self) -> bool {
        !self.bottom.is_subset(self.top)
    }

    /// Vertices whose membership is still open.
    pub const fn free(self) -> VertexSet {
        self.top.difference(self.bottom)
    }

    /// Number of represented sets.
    pub fn count(self) -> u128 {
        if self.is_empty() {
            0
        } else {
            1u128 << self.free().len()
        }
    }

    pub const fn contains(self, set: VertexSet) -> bool {
        self.bottom.is_subset(set) && set.is_subset(self.top)
    }

    pub fn intersect(self, other: Interval) -> Interval {
        Interval { bottom: self.bottom.union(other.bottom), top: self.top.intersection(other.top) }
    }

    /// Every represented set, in increasing order of the free bits.
    pub fn members(self) -> Members {
        let free = self.free().0;
        Members { base: self.bottom.0, free, sub: 0, done: self.is_empty() }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.bottom, self.top)
    }
}

/// Iterator over the sets of an [`Interval`].
pub struct Members {
    base: u64,
    free: u64,
    sub: u64,
    done: bool,
}

impl Iterator for Members {
    type Item = VertexSet;

    fn next(&mut self) -> Option<VertexSet> {
        if self.done {
            return None;
        }
        let out = VertexSet(self.base | self.sub);
        // Standard subset walk: next submask of `free` in increasing order.
        self.sub = self.sub.wrapping_sub(self.free) & self.free;
        if self.sub == 0 {
            self.done = true;
        }
        Some(out)
    }
}

/// Calls `visit` on every `k`-subset of `set` in lexicographic order.
pub(crate) fn for_each_subset_of_size(set: VertexSet, k: usize, visit: &mut impl FnMut(VertexSet)) {
    fn rec(rest: u64, k: usize, acc: u64, visit: &mut impl FnMut(VertexSet)) {
        if k == 0 {
            visit(VertexSet(acc));
            return;
        }
        let mut rest = rest;
        while rest.count_ones() as usize >= k {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            rec(rest, k - 1, acc | (1u64 << v), visit);
        }
    }
    rec(set.0, k, 0, visit);
}
