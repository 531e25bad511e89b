//! Forbidden-pattern detection for cliques, near-cliques and their complements.
//!
//! Every pattern here is "k vertices with at most d missing pairs", taken
//! either in the graph or in its complement. That lets one bitset search
//! serve containment tests, induced enumeration and witness generation.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::bitgraph::{BitGraph, VertexSet};

/// One of the four pattern families used throughout the search.
///
/// `Jay(k)` is `K_k` minus one edge. `IndependentSet(k)` and
/// `JayComplement(k)` are the complements of `Clique(k)` and `Jay(k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatternSpec {
    Clique(usize),
    Jay(usize),
    IndependentSet(usize),
    JayComplement(usize),
}

impl PatternSpec {
    pub fn order(self) -> usize {
        match self {
            PatternSpec::Clique(k)
            | PatternSpec::Jay(k)
            | PatternSpec::IndependentSet(k)
            | PatternSpec::JayComplement(k) => k,
        }
    }

    /// Missing pairs tolerated when searching the pattern non-induced.
    pub fn slack(self) -> usize {
        match self {
            PatternSpec::Clique(_) | PatternSpec::IndependentSet(_) => 0,
            PatternSpec::Jay(_) | PatternSpec::JayComplement(_) => 1,
        }
    }

    /// True when the pattern lives in the complement of the graph.
    pub fn on_complement(self) -> bool {
        matches!(self, PatternSpec::IndependentSet(_) | PatternSpec::JayComplement(_))
    }

    /// The same pattern looked for in the complement graph.
    pub fn complemented(self) -> PatternSpec {
        match self {
            PatternSpec::Clique(k) => PatternSpec::IndependentSet(k),
            PatternSpec::IndependentSet(k) => PatternSpec::Clique(k),
            PatternSpec::Jay(k) => PatternSpec::JayComplement(k),
            PatternSpec::JayComplement(k) => PatternSpec::Jay(k),
        }
    }

    /// The pattern left after deleting a vertex adjacent to all others
    /// (or, on the complement side, non-adjacent to all others).
    ///
    /// This is what the neighbourhood of a vertex must avoid: `K_k` becomes
    /// `K_{k-1}` and `J_k` becomes `J_{k-1}`.
    pub fn shrink(self) -> PatternSpec {
        match self {
            PatternSpec::Clique(k) => PatternSpec::Clique(k.saturating_sub(1)),
            PatternSpec::Jay(k) => PatternSpec::Jay(k.saturating_sub(1)),
            PatternSpec::IndependentSet(k) => PatternSpec::IndependentSet(k.saturating_sub(1)),
            PatternSpec::JayComplement(k) => PatternSpec::JayComplement(k.saturating_sub(1)),
        }
    }

    /// Edges a k-set needs, in the pattern's own graph, to host the pattern.
    pub fn required_edges(self) -> usize {
        let k = self.order();
        (k * k.saturating_sub(1) / 2).saturating_sub(self.slack())
    }
}

impl fmt::Display for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternSpec::Clique(k) => write!(f, "K{k}"),
            PatternSpec::Jay(k) => write!(f, "J{k}"),
            PatternSpec::IndependentSet(k) => write!(f, "coK{k}"),
            PatternSpec::JayComplement(k) => write!(f, "coJ{k}"),
        }
    }
}

impl std::str::FromStr for PatternSpec {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        let bad = || crate::Error::Usage(format!("unknown pattern `{s}` (expected K4, J5, coK3, coJ6)"));
        let (ctor, digits): (fn(usize) -> PatternSpec, &str) = if let Some(r) = s.strip_prefix("coK") {
            (PatternSpec::IndependentSet, r)
        } else if let Some(r) = s.strip_prefix("coJ") {
            (PatternSpec::JayComplement, r)
        } else if let Some(r) = s.strip_prefix('K') {
            (PatternSpec::Clique, r)
        } else if let Some(r) = s.strip_prefix('J') {
            (PatternSpec::Jay, r)
        } else {
            return Err(bad());
        };
        let k: usize = digits.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        Ok(ctor(k))
    }
}

/// Adjacency rows of the graph the pattern lives in.
fn pattern_rows(g: &BitGraph, on_complement: bool) -> Vec<u64> {
    if on_complement {
        g.complement().adjacency().to_vec()
    } else {
        g.adjacency().to_vec()
    }
}

/// Depth-first search for `k`-subsets of `cand` spanning at most `slack`
/// missing pairs in `rows`. `visit` returns `false` to stop the search.
pub(crate) fn dense_subsets<F>(rows: &[u64], cand: VertexSet, k: usize, slack: usize, visit: &mut F) -> bool
where
    F: FnMut(VertexSet, usize) -> bool,
{
    fn rec<F: FnMut(VertexSet, usize) -> bool>(
        rows: &[u64],
        chosen: VertexSet,
        common: u64,
        size: usize,
        missing: usize,
        mut cand: u64,
        k: usize,
        slack: usize,
        visit: &mut F,
    ) -> bool {
        if size == k {
            return visit(chosen, missing);
        }
        if missing == slack {
            cand &= common;
        }
        while cand != 0 {
            if size + cand.count_ones() as usize + 0 < k {
                return true;
            }
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            let miss = (chosen.0 & !rows[v]).count_ones() as usize;
            if missing + miss > slack {
                continue;
            }
            if !rec(
                rows,
                chosen.with(v),
                common & rows[v],
                size + 1,
                missing + miss,
                cand,
                k,
                slack,
                visit,
            ) {
                return false;
            }
        }
        true
    }
    rec(rows, VertexSet::EMPTY, u64::MAX, 0, 0, cand.0, k, slack, visit)
}

/// Finds one occurrence of `p` (non-induced), if any.
pub fn find_pattern(g: &BitGraph, p: PatternSpec) -> Option<VertexSet> {
    let k = p.order();
    if k > g.n() {
        return None;
    }
    let rows = pattern_rows(g, p.on_complement());
    let mut found = None;
    dense_subsets(&rows, g.vertices(), k, p.slack(), &mut |s, _| {
        found = Some(s);
        false
    });
    found
}

/// Whether `g` contains `p`. `Clique`/`Jay` are plain subgraph containment;
/// the complement kinds test the complement graph.
pub fn contains_pattern(g: &BitGraph, p: PatternSpec) -> bool {
    find_pattern(g, p).is_some()
}

/// Occurrence of `p` that uses vertex `v`, if any.
pub fn find_pattern_through(g: &BitGraph, p: PatternSpec, v: usize) -> Option<VertexSet> {
    let k = p.order();
    if k == 0 || k > g.n() {
        return None;
    }
    let rows = pattern_rows(g, p.on_complement());
    let others = g.vertices().without(v);
    // Partners of v must miss at most `slack` of its pairs.
    let mut found = None;
    dense_subsets(&rows, others, k - 1, p.slack(), &mut |s, missing| {
        let extra = (s.0 & !rows[v]).count_ones() as usize;
        if missing + extra <= p.slack() {
            found = Some(s.with(v));
            false
        } else {
            true
        }
    });
    found
}

/// All vertex sets inducing exactly the pattern: a clique, an independent
/// set, or a near-clique / near-independent set missing exactly one pair.
pub fn enumerate_induced(g: &BitGraph, p: PatternSpec) -> Vec<VertexSet> {
    let k = p.order();
    if k > g.n() {
        return Vec::new();
    }
    let rows = pattern_rows(g, p.on_complement());
    let want = p.slack().min(k * k.saturating_sub(1) / 2);
    let mut out = Vec::new();
    dense_subsets(&rows, g.vertices(), k, p.slack(), &mut |s, missing| {
        if missing == want {
            out.push(s);
        }
        true
    });
    out
}

/// The two patterns defining a class `R_G(p1, p2)`: graphs with no `p1`
/// whose complement has no `p2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ForbiddenPair {
    pub p1: PatternSpec,
    pub p2: PatternSpec,
}

impl ForbiddenPair {
    pub const fn new(p1: PatternSpec, p2: PatternSpec) -> Self {
        ForbiddenPair { p1, p2 }
    }

    /// Both patterns expressed on the graph itself.
    pub fn graph_patterns(self) -> [PatternSpec; 2] {
        [self.p1, self.p2.complemented()]
    }

    /// The pair whose class holds the complements of this class.
    pub fn swapped(self) -> ForbiddenPair {
        ForbiddenPair { p1: self.p2, p2: self.p1 }
    }

    /// The pair a vertex neighbourhood must avoid.
    pub fn neighbourhood(self) -> ForbiddenPair {
        let p1 = if self.p1.on_complement() { self.p1 } else { self.p1.shrink() };
        let p2 = if self.p2.on_complement() { self.p2.shrink() } else { self.p2 };
        ForbiddenPair { p1, p2 }
    }

    /// The pair the non-neighbourhood of a vertex must avoid.
    pub fn non_neighbourhood(self) -> ForbiddenPair {
        self.swapped().neighbourhood().swapped()
    }

    pub fn admits(self, g: &BitGraph) -> bool {
        self.violation(g).is_none()
    }

    /// First occurrence of a forbidden pattern, tagged with the pattern as seen on `g`.
    pub fn violation(self, g: &BitGraph) -> Option<(PatternSpec, VertexSet)> {
        self.graph_patterns().into_iter().find_map(|p| find_pattern(g, p).map(|s| (p, s)))
    }

    /// Whether some forbidden pattern passes through `v`. When `g - v` is
    /// admitted this decides membership of `g`.
    pub fn violated_through(self, g: &BitGraph, v: usize) -> bool {
        self.graph_patterns().into_iter().any(|p| find_pattern_through(g, p, v).is_some())
    }
}

impl fmt::Display for ForbiddenPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p1, self.p2)
    }
}
