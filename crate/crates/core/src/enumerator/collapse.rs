//! Interval rules for the direction that fixes `G1`, and collapsing.
//!
//! Each vertex `u_i` of `G2` gets an interval `(B_i, T_i)` of cones into the
//! fixed `G1`. Violation checks reject a whole assignment of intervals;
//! repairs shrink tops and grow bottoms without losing any valid choice of
//! cones. Every repair is monotone, so iterating them reaches the same
//! fixpoint in any order.

use serde::{Deserialize, Serialize};

use super::cones::sparse_triples;
use crate::graph::{BitGraph, VertexSet};
use crate::interval::Interval;

/// Precomputed structure of the fixed `G1`.
#[derive(Clone, Debug)]
pub struct G1Shape {
    pub g1: BitGraph,
    all: VertexSet,
    /// Independent 3-sets.
    indep3: Vec<VertexSet>,
    /// 3-sets with at most one edge.
    sparse3: Vec<VertexSet>,
}

impl G1Shape {
    pub fn new(g1: &BitGraph) -> Self {
        G1Shape { g1: g1.clone(), all: g1.vertices(), indep3: sparse_triples(g1, 0), sparse3: sparse_triples(g1, 1) }
    }

    fn has_edge_in(&self, s: VertexSet) -> bool {
        s.iter().any(|w| !self.g1.neighbors(w).is_disjoint(s))
    }

    /// Vertices `x` for which some triple of `family` through `x` has its
    /// other two vertices inside `out`.
    fn completes(family: &[VertexSet], out: VertexSet) -> VertexSet {
        let mut acc = VertexSet::EMPTY;
        for &t in family {
            let inside = t.intersection(out);
            match inside.len() {
                3 => acc = acc.union(t),
                2 => acc = acc.union(t.difference(inside)),
                _ => {}
            }
        }
        acc
    }
}

/// Relations among the vertices of a `G2`-side graph that the rules use.
#[derive(Clone, Debug)]
pub struct NodeShape {
    pub z: usize,
    edges: Vec<(usize, usize)>,
    non_edges: Vec<(usize, usize)>,
    triangles: Vec<[usize; 3]>,
    indep3: Vec<[usize; 3]>,
    sparse3: Vec<[usize; 3]>,
}

impl NodeShape {
    pub fn new(h: &BitGraph) -> Self {
        let z = h.n();
        let mut s = NodeShape {
            z,
            edges: Vec::new(),
            non_edges: Vec::new(),
            triangles: Vec::new(),
            indep3: Vec::new(),
            sparse3: Vec::new(),
        };
        for j in 1..z {
            for i in 0..j {
                if h.has_edge(i, j) {
                    s.edges.push((i, j));
                } else {
                    s.non_edges.push((i, j));
                }
            }
        }
        for k in 2..z {
            for j in 1..k {
                for i in 0..j {
                    let e = h.has_edge(i, j) as usize + h.has_edge(i, k) as usize + h.has_edge(j, k) as usize;
                    match e {
                        3 => s.triangles.push([i, j, k]),
                        0 => {
                            s.indep3.push([i, j, k]);
                            s.sparse3.push([i, j, k]);
                        }
                        1 => s.sparse3.push([i, j, k]),
                        _ => {}
                    }
                }
            }
        }
        s
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepOrder {
    /// `k'2`, `k'3`, then `e'2`, `e'3`, `j'3`.
    #[default]
    ShrinkFirst,
    GrowFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimedRule {
    K2,
    K3,
    E2,
    E3,
    J3,
}

const ROTATIONS: [[usize; 3]; 3] = [[0, 1, 2], [1, 0, 2], [2, 0, 1]];

fn shrink_sweep(g: &G1Shape, s: &NodeShape, c: &mut [Interval]) -> bool {
    let mut changed = false;
    for &(a, b) in &s.edges {
        for (i, j) in [(a, b), (b, a)] {
            // (k'2) w in B_j adjacent to something in B_i ∩ B_j cannot join C_i.
            let common = c[i].bottom.intersection(c[j].bottom);
            let bad: VertexSet =
                c[j].bottom.iter().filter(|&w| !g.g1.neighbors(w).is_disjoint(common)).collect();
            let top = c[i].top.difference(bad);
            if top != c[i].top {
                c[i].top = top;
                changed = true;
            }
        }
    }
    for t in &s.triangles {
        for r in ROTATIONS {
            let (i, j, k) = (t[r[0]], t[r[1]], t[r[2]]);
            // (k'3)
            let top = c[i].top.difference(c[j].bottom.intersection(c[k].bottom));
            if top != c[i].top {
                c[i].top = top;
                changed = true;
            }
        }
    }
    changed
}

fn grow(c: &mut [Interval], i: usize, add: VertexSet) -> bool {
    let b = c[i].bottom.union(add);
    if b != c[i].bottom {
        c[i].bottom = b;
        true
    } else {
        false
    }
}

fn grow_sweep(g: &G1Shape, s: &NodeShape, c: &mut [Interval]) -> bool {
    let mut changed = false;
    for &(a, b) in &s.edges {
        for (i, j) in [(a, b), (b, a)] {
            // (k'2) an independent triple may not sit outside T_i ∪ T_j.
            let out = g.all.difference(c[i].top.union(c[j].top));
            let add = G1Shape::completes(&g.indep3, out).difference(c[j].top);
            changed |= grow(c, i, add);
        }
    }
    for &(a, b) in &s.non_edges {
        for (i, j) in [(a, b), (b, a)] {
            let out = g.all.difference(c[i].top.union(c[j].top));
            // (e'2) no triple with at most one edge outside both cones.
            let add = G1Shape::completes(&g.sparse3, out).difference(c[j].top);
            changed |= grow(c, i, add);
            // (e'2) an independent triple needs two cone hits in total.
            let add = G1Shape::completes(&g.indep3, out);
            changed |= grow(c, i, add);
        }
    }
    for t in &s.indep3 {
        for r in ROTATIONS {
            let (i, j, k) = (t[r[0]], t[r[1]], t[r[2]]);
            // (e'3) the three cones cover G1.
            let add = g.all.difference(c[j].top.union(c[k].top));
            changed |= grow(c, i, add);
        }
    }
    for t in &s.sparse3 {
        for r in ROTATIONS {
            let (i, j, k) = (t[r[0]], t[r[1]], t[r[2]]);
            // (j'3) no non-adjacent pair outside all three cones.
            let out3 = g.all.difference(c[i].top.union(c[j].top).union(c[k].top));
            let cand = g.all.difference(c[j].top.union(c[k].top));
            let add: VertexSet = cand
                .iter()
                .filter(|&x| {
                    let non_nbrs = g.all.difference(g.g1.neighbors(x)).without(x);
                    !non_nbrs.is_disjoint(out3)
                })
                .collect();
            changed |= grow(c, i, add);
        }
    }
    changed
}

/// First violated rule of an interval assignment, if any.
pub fn check_primed_rules(g: &G1Shape, s: &NodeShape, c: &[Interval]) -> Option<PrimedRule> {
    for &(i, j) in &s.edges {
        if g.has_edge_in(c[i].bottom.intersection(c[j].bottom)) {
            return Some(PrimedRule::K2);
        }
        let out = g.all.difference(c[i].top.union(c[j].top));
        if g.indep3.iter().any(|t| t.is_subset(out)) {
            return Some(PrimedRule::K2);
        }
    }
    for t in &s.triangles {
        if !c[t[0]].bottom.intersection(c[t[1]].bottom).intersection(c[t[2]].bottom).is_empty() {
            return Some(PrimedRule::K3);
        }
    }
    for &(i, j) in &s.non_edges {
        let out = g.all.difference(c[i].top.union(c[j].top));
        if g.sparse3.iter().any(|t| t.is_subset(out)) {
            return Some(PrimedRule::E2);
        }
        if g.indep3.iter().any(|&v| c[i].top.intersection(v).len() + c[j].top.intersection(v).len() <= 1) {
            return Some(PrimedRule::E2);
        }
    }
    for t in &s.indep3 {
        if c[t[0]].top.union(c[t[1]].top).union(c[t[2]].top) != g.all {
            return Some(PrimedRule::E3);
        }
    }
    for t in &s.sparse3 {
        let out3 = g.all.difference(c[t[0]].top.union(c[t[1]].top).union(c[t[2]].top));
        if out3.iter().any(|x| !out3.difference(g.g1.neighbors(x)).without(x).is_empty()) {
            return Some(PrimedRule::J3);
        }
    }
    None
}

/// Collapse statistics for one call.
#[derive(Clone, Copy, Debug, Default)]
pub struct CollapseRun {
    pub sweeps: usize,
}

/// Applies the repairs until nothing changes, then checks the rules.
/// Returns `false` when the assignment has no valid cone choice.
pub fn collapse_cell(g: &G1Shape, s: &NodeShape, c: &mut [Interval], order: SweepOrder, run: &mut CollapseRun) -> bool {
    debug_assert_eq!(c.len(), s.z);
    if c.iter().any(|i| i.is_empty()) {
        return false;
    }
    loop {
        run.sweeps += 1;
        let changed = match order {
            SweepOrder::ShrinkFirst => shrink_sweep(g, s, c) | grow_sweep(g, s, c),
            SweepOrder::GrowFirst => grow_sweep(g, s, c) | shrink_sweep(g, s, c),
        };
        if c.iter().any(|i| i.is_empty()) {
            return false;
        }
        if !changed {
            break;
        }
    }
    check_primed_rules(g, s, c).is_none()
}

/// Resolves a collapsed assignment into single-cone assignments by
/// splitting on the lowest free vertex of the first open interval.
pub fn split_to_cones(
    g: &G1Shape,
    s: &NodeShape,
    c: Vec<Interval>,
    order: SweepOrder,
    run: &mut CollapseRun,
    out: &mut Vec<Vec<VertexSet>>,
) {
    let Some(idx) = c.iter().position(|i| i.bottom != i.top) else {
        out.push(c.iter().map(|i| i.bottom).collect());
        return;
    };
    let w = c[idx].free().first().expect("open interval has a free vertex");
    let mut with = c.clone();
    with[idx].bottom.insert(w);
    if collapse_cell(g, s, &mut with, order, run) {
        split_to_cones(g, s, with, order, run, out);
    }
    let mut without = c;
    without[idx].top.remove(w);
    if collapse_cell(g, s, &mut without, order, run) {
        split_to_cones(g, s, without, order, run, out);
    }
}
