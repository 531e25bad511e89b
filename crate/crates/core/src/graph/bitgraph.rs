use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vertex count a [`BitGraph`] can hold.
pub const MAX_VERTICES: usize = 64;

/// A set of vertices packed into one machine word.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    /// The set `{0, .., n-1}`.
    #[inline]
    pub const fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    #[inline]
    pub const fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    pub fn from_iter_vertices<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut bits = 0u64;
        for v in iter {
            bits |= 1u64 << v;
        }
        VertexSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn contains(self, v: usize) -> bool {
        v < 64 && (self.0 >> v) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u64 << v);
    }

    #[inline]
    pub const fn with(self, v: usize) -> Self {
        VertexSet(self.0 | (1u64 << v))
    }

    #[inline]
    pub const fn without(self, v: usize) -> Self {
        VertexSet(self.0 & !(1u64 << v))
    }

    #[inline]
    pub const fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    #[inline]
    pub const fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    #[inline]
    pub const fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    #[inline]
    pub const fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Lowest member, if any.
    #[inline]
    pub const fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    #[inline]
    pub fn iter(self) -> VertexIter {
        VertexIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl IntoIterator for VertexSet {
    type Item = usize;
    type IntoIter = VertexIter;

    fn into_iter(self) -> VertexIter {
        self.iter()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::from_iter_vertices(iter)
    }
}

/// Ascending iterator over the members of a [`VertexSet`].
#[derive(Clone)]
pub struct VertexIter(u64);

impl Iterator for VertexIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for VertexIter {}

/// Undirected simple graph on at most 64 vertices, one adjacency word per vertex.
///
/// `adj[v]` has bit `u` set iff `{u, v}` is an edge. The adjacency is kept
/// symmetric and irreflexive, and no bit at or above `n` is ever set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitGraph {
    n: usize,
    adj: Vec<u64>,
}

impl BitGraph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_VERTICES, "at most {MAX_VERTICES} vertices supported");
        BitGraph { n, adj: vec![0; n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = BitGraph::empty(n);
        let all = VertexSet::full(n).bits();
        for v in 0..n {
            g.adj[v] = all & !(1u64 << v);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = BitGraph::empty(n);
        if n >= 3 {
            for v in 0..n {
                g.add_edge(v, (v + 1) % n);
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = BitGraph::empty(n);
        for v in 1..n {
            g.add_edge(v - 1, v);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = BitGraph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Builds a graph from raw adjacency words, checking every invariant.
    pub fn from_adjacency(adj: Vec<u64>) -> Result<Self> {
        let n = adj.len();
        if n > MAX_VERTICES {
            return Err(Error::Usage(format!("{n} vertices exceeds the {MAX_VERTICES}-vertex cap")));
        }
        let mask = VertexSet::full(n).bits();
        for (v, &row) in adj.iter().enumerate() {
            if row & !mask != 0 {
                return Err(Error::Usage(format!("vertex {v} has neighbours outside 0..{n}")));
            }
            if (row >> v) & 1 == 1 {
                return Err(Error::Usage(format!("self-loop at vertex {v}")));
            }
            for u in VertexSet(row) {
                if (adj[u] >> v) & 1 == 0 {
                    return Err(Error::Usage(format!("asymmetric adjacency between {v} and {u}")));
                }
            }
        }
        Ok(BitGraph { n, adj })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> VertexSet {
        VertexSet(self.adj[v])
    }

    #[inline]
    pub fn adjacency(&self) -> &[u64] {
        &self.adj
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        (self.adj[u] >> v) & 1 == 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n && u != v, "bad edge ({u}, {v}) on {} vertices", self.n);
        self.adj[u] |= 1u64 << v;
        self.adj[v] |= 1u64 << u;
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u] &= !(1u64 << v);
        self.adj[v] &= !(1u64 << u);
    }

    pub fn set_edge(&mut self, u: usize, v: usize, present: bool) {
        if present {
            self.add_edge(u, v);
        } else {
            self.remove_edge(u, v);
        }
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    /// Number of edges with both endpoints in `s`.
    #[inline]
    pub fn edges_within(&self, s: VertexSet) -> usize {
        let mut twice = 0;
        for v in s {
            twice += (self.adj[v] & s.0).count_ones() as usize;
        }
        twice / 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            VertexSet(self.adj[u] & !VertexSet::full(u + 1).0).iter().map(move |v| (u, v))
        })
    }

    pub fn complement(&self) -> BitGraph {
        let all = VertexSet::full(self.n).bits();
        let adj = self
            .adj
            .iter()
            .enumerate()
            .map(|(v, &row)| !row & all & !(1u64 << v))
            .collect();
        BitGraph { n: self.n, adj }
    }

    /// Subgraph induced on `verts`, relabelled to `0..k` in ascending order of
    /// the original indices. The second component maps new to old indices.
    pub fn induced(&self, verts: VertexSet) -> (BitGraph, Vec<usize>) {
        let map = verts.to_vec();
        (self.induced_ordered(&map), map)
    }

    /// Subgraph induced on `order`, with new vertex `i` = old vertex `order[i]`.
    pub fn induced_ordered(&self, order: &[usize]) -> BitGraph {
        let mut g = BitGraph::empty(order.len());
        for (i, &u) in order.iter().enumerate() {
            let mut row = 0u64;
            for (j, &w) in order.iter().enumerate() {
                if self.has_edge(u, w) {
                    row |= 1u64 << j;
                }
            }
            g.adj[i] = row;
        }
        g
    }

    /// Neighbourhood graph of `v` and the map from its vertices to ours.
    pub fn neighbors_graph(&self, v: usize) -> Result<(BitGraph, Vec<usize>)> {
        self.check_vertex(v)?;
        Ok(self.induced(self.neighbors(v)))
    }

    /// Graph induced on the non-neighbours of `v` (excluding `v`).
    pub fn non_neighbors_graph(&self, v: usize) -> Result<(BitGraph, Vec<usize>)> {
        self.check_vertex(v)?;
        Ok(self.induced(self.vertices().difference(self.neighbors(v)).without(v)))
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::Usage(format!("vertex {v} out of range for a {}-vertex graph", self.n)))
        } else {
            Ok(())
        }
    }

    /// Relabels so that old vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> BitGraph {
        debug_assert_eq!(perm.len(), self.n);
        let mut g = BitGraph::empty(self.n);
        for v in 0..self.n {
            let mut row = 0u64;
            for u in self.neighbors(v) {
                row |= 1u64 << perm[u];
            }
            g.adj[perm[v]] = row;
        }
        g
    }

    /// Appends a vertex adjacent to exactly `nbrs`.
    pub fn with_vertex(&self, nbrs: VertexSet) -> BitGraph {
        assert!(self.n < MAX_VERTICES);
        assert!(nbrs.is_subset(self.vertices()));
        let mut g = self.clone();
        let w = g.n;
        g.n += 1;
        g.adj.push(nbrs.0);
        for u in nbrs {
            g.adj[u] |= 1u64 << w;
        }
        g
    }

    /// Disjoint union with `other`, whose vertices are shifted past ours.
    pub fn disjoint_union(&self, other: &BitGraph) -> BitGraph {
        let n = self.n + other.n;
        assert!(n <= MAX_VERTICES);
        let mut adj = self.adj.clone();
        adj.extend(other.adj.iter().map(|&r| r << self.n));
        BitGraph { n, adj }
    }
}

impl fmt::Debug for BitGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitGraph(n={}, edges=[", self.n)?;
        for (i, (u, v)) in self.edges().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{u}-{v}")?;
        }
        write!(f, "])")
    }
}
