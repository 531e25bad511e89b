//! Feasible cones on both sides, minimal cones and the interval partition.
//!
//! Throughout, `v` is joined to all of `G1 ∈ R_G(K3, J5)` and to none of
//! `G2 ∈ R_G(K4, J4)`; a cone is a candidate neighbour set on the other side.

use crate::graph::{BitGraph, VertexSet};
use crate::interval::{for_each_subset_of_size, Interval};

/// 3-sets of `g` with at most `max_edges` edges.
pub(crate) fn sparse_triples(g: &BitGraph, max_edges: usize) -> Vec<VertexSet> {
    let mut out = Vec::new();
    for_each_subset_of_size(g.vertices(), 3, &mut |s| {
        if g.edges_within(s) <= max_edges {
            out.push(s);
        }
    });
    out
}

/// 4-sets of `g` with at most `max_edges` edges.
pub(crate) fn sparse_quads(g: &BitGraph, max_edges: usize) -> Vec<VertexSet> {
    let mut out = Vec::new();
    for_each_subset_of_size(g.vertices(), 4, &mut |s| {
        if g.edges_within(s) <= max_edges {
            out.push(s);
        }
    });
    out
}

/// Cones into `g2` for a vertex of `G1`: at most six vertices, no triangle
/// inside, and no independent triple left outside.
pub fn feasible_cones_into_g2(g2: &BitGraph) -> Vec<VertexSet> {
    let all = g2.vertices();
    let triangles: Vec<VertexSet> = {
        let mut t = Vec::new();
        for_each_subset_of_size(all, 3, &mut |s| {
            if g2.edges_within(s) == 3 {
                t.push(s);
            }
        });
        t
    };
    let independent = sparse_triples(g2, 0);
    let mut out = Vec::new();
    for size in 0..=6.min(g2.n()) {
        for_each_subset_of_size(all, size, &mut |c| {
            let rest = all.difference(c);
            if rest.len() <= 8
                && !triangles.iter().any(|t| t.is_subset(c))
                && !independent.iter().any(|t| t.is_subset(rest))
            {
                out.push(c);
            }
        });
    }
    out
}

/// Cones into `g1` for a vertex of `G2`: what is left outside has no 4-set
/// with at most one edge, and every independent 4-set keeps two vertices inside.
pub fn feasible_cones_into_g1(g1: &BitGraph) -> Vec<VertexSet> {
    let quads = sparse_quads(g1, 1);
    let n = g1.n();
    (0u64..1 << n).map(VertexSet).filter(|&c| cone_into_g1_ok(g1, &quads, c)).collect()
}

fn cone_into_g1_ok(g1: &BitGraph, quads: &[VertexSet], c: VertexSet) -> bool {
    quads.iter().all(|&q| {
        let inside = q.intersection(c).len();
        if g1.edges_within(q) == 0 {
            inside >= 2
        } else {
            inside >= 1
        }
    })
}

/// Inclusion-minimal cones, found by scanning in increasing size.
pub fn minimal_cones(cones: &[VertexSet]) -> Vec<VertexSet> {
    let mut sorted: Vec<VertexSet> = cones.to_vec();
    sorted.sort_by_key(|c| (c.len(), c.0));
    let mut minimal: Vec<VertexSet> = Vec::new();
    for c in sorted {
        if !minimal.iter().any(|m| m.is_subset(c)) {
            minimal.push(c);
        }
    }
    minimal
}

/// Splits an upward-closed cone family into disjoint intervals.
///
/// Bottoms are taken in list order: minimal cones by size, then the rest by
/// size. Each top starts as all of `universe` and is cut back, one vertex of
/// an earlier bottom at a time, until the new interval misses every earlier
/// one; of all ways to do that the largest top wins.
pub fn partition_intervals(cones: &[VertexSet], minimals: &[VertexSet], universe: VertexSet) -> Vec<Interval> {
    let mut order: Vec<VertexSet> = minimals.to_vec();
    order.sort_by_key(|c| (c.len(), c.0));
    let mut rest: Vec<VertexSet> = cones.iter().copied().filter(|c| !minimals.contains(c)).collect();
    rest.sort_by_key(|c| (c.len(), c.0));
    order.extend(rest);

    let mut out: Vec<Interval> = Vec::new();
    for b in order {
        if out.iter().any(|iv| iv.contains(b)) {
            continue;
        }
        let mut best = None;
        largest_top(&out, 0, b, universe, &mut best);
        let top = best.expect("the bottom alone always separates");
        out.push(Interval::new(b, top));
    }
    out
}

fn largest_top(prior: &[Interval], idx: usize, b: VertexSet, t: VertexSet, best: &mut Option<VertexSet>) {
    if let Some(bt) = *best {
        if t.len() <= bt.len() {
            return;
        }
    }
    let Some(p) = prior.get(idx) else {
        *best = Some(t);
        return;
    };
    if !p.bottom.is_subset(t) || !b.is_subset(p.top) {
        largest_top(prior, idx + 1, b, t, best);
        return;
    }
    // b is not in p, so p.bottom has a vertex outside b.
    for w in p.bottom.difference(b) {
        largest_top(prior, idx + 1, b, t.without(w), best);
    }
}
