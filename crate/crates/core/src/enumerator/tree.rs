//! Adjunct sequences and the double tree of induced subgraphs.
//!
//! Every node is a graph kept in its canonical vertex order `w_1..w_z`.
//! Its parent drops `w_z`; its adjunct keeps `w_1..w_{a_z - 1}` and `w_z`.
//! Both share the prefix `w_1..w_{a_z - 1}`, which is what lets cells of a
//! node be built from a parent cell and an adjunct cell.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{canonical_labelling, graph6, BitGraph, VertexSet};

/// The values `a_2, a_3, ..` of an adjunct sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AdjunctSequence {
    a: Vec<usize>,
}

impl AdjunctSequence {
    /// Longest sequence ever needed: side graphs have at most ten vertices.
    pub const DEFAULT_LEN: usize = 16;

    /// `values[0]` is `a_2`.
    pub fn new(values: Vec<usize>) -> Result<Self> {
        for (k, &v) in values.iter().enumerate() {
            let i = k + 2;
            if k == 0 && v != 1 {
                return Err(Error::Usage(format!("adjunct sequence must start with a_2 = 1, got {v}")));
            }
            if v == 0 || v >= i {
                return Err(Error::Usage(format!("a_{i} = {v} must lie in 1..{i}")));
            }
            if k > 0 && v < values[k - 1] {
                return Err(Error::Usage(format!("adjunct sequence decreases at a_{i}")));
            }
        }
        Ok(AdjunctSequence { a: values })
    }

    /// `a_i = max(1, i - 3)`.
    pub fn window(depth: usize, len: usize) -> Self {
        AdjunctSequence { a: (2..len + 2).map(|i| i.saturating_sub(depth).max(1)).collect() }
    }

    /// `a_z`, the order of the adjunct of a `z`-vertex node.
    pub fn get(&self, z: usize) -> Result<usize> {
        if z < 2 {
            return Err(Error::Usage(format!("no adjunct for a graph with {z} vertices")));
        }
        self.a
            .get(z - 2)
            .copied()
            .ok_or_else(|| Error::Usage(format!("adjunct sequence has no value for a_{z}")))
    }

    pub fn values(&self) -> &[usize] {
        &self.a
    }
}

impl Default for AdjunctSequence {
    fn default() -> Self {
        AdjunctSequence::window(3, Self::DEFAULT_LEN)
    }
}

impl fmt::Display for AdjunctSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.a.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for AdjunctSequence {
    type Err = Error;

    /// Either explicit values `1,1,2,...` or `window:D` for `a_i = max(1, i - D)`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(d) = s.trim().strip_prefix("window:") {
            let d = d.trim().parse().map_err(|_| Error::Usage(format!("bad window depth `{d}`")))?;
            return Ok(AdjunctSequence::window(d, 16));
        }
        let values = s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Usage(format!("bad adjunct value `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        AdjunctSequence::new(values)
    }
}

impl TryFrom<String> for AdjunctSequence {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AdjunctSequence> for String {
    fn from(s: AdjunctSequence) -> String {
        s.to_string()
    }
}

/// `g` without its last vertex.
pub fn parent(g: &BitGraph) -> Result<BitGraph> {
    if g.n() <= 1 {
        return Err(Error::Usage("parent needs at least two vertices".into()));
    }
    Ok(g.induced(VertexSet::full(g.n() - 1)).0)
}

/// Vertices of `g` kept by the adjunct, in order.
fn adjunct_vertices(z: usize, seq: &AdjunctSequence) -> Result<Vec<usize>> {
    let a = seq.get(z)?;
    let mut keep: Vec<usize> = (0..a - 1).collect();
    keep.push(z - 1);
    Ok(keep)
}

/// Subgraph induced on `w_1..w_{a_z - 1}, w_z`.
pub fn adjunct(g: &BitGraph, seq: &AdjunctSequence) -> Result<BitGraph> {
    if g.n() <= 1 {
        return Err(Error::Usage("adjunct needs at least two vertices".into()));
    }
    Ok(g.induced_ordered(&adjunct_vertices(g.n(), seq)?))
}

/// Edge to a lower node. `map[j]` is the target's vertex for vertex `j` of
/// the labelled subgraph.
#[derive(Clone, Debug)]
pub struct Link {
    pub level: usize,
    pub index: usize,
    pub map: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub g: BitGraph,
    pub parent: Option<Link>,
    pub adjunct: Option<Link>,
    pub on_main_branch: bool,
}

/// Nodes by level; `levels[z]` holds the `z`-vertex nodes.
#[derive(Clone, Debug)]
pub struct DoubleTree {
    pub seq: AdjunctSequence,
    pub top: usize,
    pub levels: Vec<Vec<TreeNode>>,
}

impl DoubleTree {
    pub fn node_count(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    /// Nodes below the top level.
    pub fn interior_count(&self) -> usize {
        self.node_count() - self.levels.get(self.top).map_or(0, Vec::len)
    }

    pub fn node(&self, level: usize, index: usize) -> &TreeNode {
        &self.levels[level][index]
    }
}

/// Builds the tree above `level_graphs`, which must all have the same
/// order. Isomorphic subgraphs are merged into one node.
pub fn build_double_tree(level_graphs: &[BitGraph], seq: &AdjunctSequence) -> Result<DoubleTree> {
    let Some(top) = level_graphs.first().map(BitGraph::n) else {
        return Ok(DoubleTree { seq: seq.clone(), top: 0, levels: vec![Vec::new()] });
    };
    if top == 0 || level_graphs.iter().any(|g| g.n() != top) {
        return Err(Error::Usage("level graphs must share one positive order".into()));
    }
    if top >= 2 {
        seq.get(top)?;
    }
    let mut keys: Vec<BTreeMap<String, usize>> = vec![BTreeMap::new(); top + 1];
    let mut levels: Vec<Vec<TreeNode>> = vec![Vec::new(); top + 1];
    let mut intern = |levels: &mut Vec<Vec<TreeNode>>, g: &BitGraph| -> Link {
        let lab = canonical_labelling(g);
        let z = g.n();
        let key = graph6::encode(&lab.graph);
        let index = *keys[z].entry(key).or_insert_with(|| {
            levels[z].push(TreeNode { g: lab.graph.clone(), parent: None, adjunct: None, on_main_branch: false });
            levels[z].len() - 1
        });
        Link { level: z, index, map: lab.perm }
    };
    for g in level_graphs {
        intern(&mut levels, g);
    }
    for z in (2..=top).rev() {
        let keep = adjunct_vertices(z, seq)?;
        let mut i = 0;
        while i < levels[z].len() {
            let g = levels[z][i].g.clone();
            let p = intern(&mut levels, &parent(&g)?);
            let a = intern(&mut levels, &g.induced_ordered(&keep));
            levels[z][i].parent = Some(p);
            levels[z][i].adjunct = Some(a);
            i += 1;
        }
    }
    for node in &mut levels[top] {
        node.on_main_branch = true;
    }
    for z in (2..=top).rev() {
        for i in 0..levels[z].len() {
            if levels[z][i].on_main_branch {
                let p = levels[z][i].parent.as_ref().expect("linked").index;
                levels[z - 1][p].on_main_branch = true;
            }
        }
    }
    Ok(DoubleTree { seq: seq.clone(), top, levels })
}

/// Counters from growing cells along a tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowStats {
    pub nodes: usize,
    pub joins: usize,
    pub cells: usize,
}

impl GrowStats {
    pub fn add(&mut self, o: &GrowStats) {
        self.nodes += o.nodes;
        self.joins += o.joins;
        self.cells += o.cells;
    }
}

/// How cells are made and combined along the tree.
pub trait CellRules {
    type Cell: Clone;
    type Key: Hash + Eq;

    /// Cells of a one-vertex node.
    fn initial(&self) -> Vec<Self::Cell>;
    /// Reorders a cell of a lower node onto the vertices of a subgraph.
    fn transport(&self, cell: &Self::Cell, map: &[usize]) -> Self::Cell;
    /// Join key over the first `k` vertices.
    fn key(&self, cell: &Self::Cell, k: usize) -> Self::Key;
    /// Combines a transported parent cell and a transported adjunct cell
    /// sharing the first `k` vertices; `None` if nothing valid remains.
    /// `at` is the node's `(level, index)`.
    fn join(&self, at: (usize, usize), node: &TreeNode, p: &Self::Cell, a: &Self::Cell, k: usize) -> Option<Self::Cell>;
}

/// Cells of every top-level node, computed level by level. Cells of a
/// node are dropped once no higher node needs them.
pub fn grow_cells<R: CellRules>(tree: &DoubleTree, rules: &R, stats: &mut GrowStats) -> Vec<Vec<R::Cell>> {
    let top = tree.top;
    if top == 0 {
        return Vec::new();
    }
    let mut last_use: Vec<Vec<usize>> = tree.levels.iter().map(|l| vec![0; l.len()]).collect();
    for z in 2..=top {
        for n in &tree.levels[z] {
            for l in [&n.parent, &n.adjunct].into_iter().flatten() {
                let u = &mut last_use[l.level][l.index];
                *u = (*u).max(z);
            }
        }
    }
    let mut cells: Vec<Vec<Option<Vec<R::Cell>>>> = tree.levels.iter().map(|l| vec![None; l.len()]).collect();
    let init = rules.initial();
    for c in cells[1].iter_mut() {
        stats.nodes += 1;
        stats.cells += init.len();
        *c = Some(init.clone());
    }
    for z in 2..=top {
        let k = tree.seq.get(z).expect("checked at build") - 1;
        for (i, node) in tree.levels[z].iter().enumerate() {
            let pl = node.parent.as_ref().expect("linked");
            let al = node.adjunct.as_ref().expect("linked");
            let pcells = cells[pl.level][pl.index].as_ref().expect("parent computed");
            let acells = cells[al.level][al.index].as_ref().expect("adjunct computed");
            let mut by_key: HashMap<R::Key, Vec<R::Cell>> = HashMap::new();
            for a in acells {
                let t = rules.transport(a, &al.map);
                by_key.entry(rules.key(&t, k)).or_default().push(t);
            }
            let mut out = Vec::new();
            for p in pcells {
                let t = rules.transport(p, &pl.map);
                if let Some(group) = by_key.get(&rules.key(&t, k)) {
                    for a in group {
                        stats.joins += 1;
                        if let Some(c) = rules.join((z, i), node, &t, a, k) {
                            out.push(c);
                        }
                    }
                }
            }
            stats.nodes += 1;
            stats.cells += out.len();
            cells[z][i] = Some(out);
        }
        for (lvl, uses) in last_use.iter().enumerate().take(z) {
            for (j, &u) in uses.iter().enumerate() {
                if u == z {
                    cells[lvl][j] = None;
                }
            }
        }
    }
    cells.swap_remove(top).into_iter().map(|c| c.expect("top computed")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_chain, BuildMethod, ClassSpec};
    use crate::graph::PatternSpec;

    #[test]
    fn sequence_validation() {
        assert!(AdjunctSequence::new(vec![1, 1, 2, 3, 4, 4]).is_ok());
        assert!(AdjunctSequence::new(vec![2]).is_err());
        assert!(AdjunctSequence::new(vec![1, 3]).is_err());
        assert!(AdjunctSequence::new(vec![1, 2, 1]).is_err());
        let d = AdjunctSequence::default();
        assert_eq!(&d.values()[..6], &[1, 1, 1, 2, 3, 4]);
        let s: AdjunctSequence = "1, 1,2".parse().unwrap();
        assert_eq!(s.to_string(), "1,1,2");
        assert!("1,x".parse::<AdjunctSequence>().is_err());
    }

    #[test]
    fn adjunct_keeps_prefix_and_last_vertex() {
        let seq = AdjunctSequence::new(vec![1, 1, 2, 3, 4, 4]).unwrap();
        assert_eq!(adjunct_vertices(6, &seq).unwrap(), vec![0, 1, 2, 5]);
        // Mark kept vertices by degree so the induced graph shows them.
        let g = BitGraph::from_edges(6, &[(0, 5), (1, 5), (2, 5), (3, 4)]);
        let a = adjunct(&g, &seq).unwrap();
        assert_eq!(a.n(), 4);
        assert_eq!(a.degrees(), vec![1, 1, 1, 3]);
        assert!(adjunct(&BitGraph::empty(1), &seq).is_err());
        assert!(parent(&BitGraph::empty(1)).is_err());
    }

    #[test]
    fn parent_twice_is_the_prefix() {
        let g = BitGraph::cycle(6);
        let pp = parent(&parent(&g).unwrap()).unwrap();
        assert_eq!(pp, g.induced(VertexSet::full(4)).0);
    }

    #[test]
    fn largest_adjunct_drops_only_the_second_to_last_vertex() {
        let seq = AdjunctSequence::new((1..7).collect()).unwrap();
        let g = BitGraph::path(5);
        let a = adjunct(&g, &seq).unwrap();
        assert_eq!(a, g.induced(VertexSet::full(5).without(3)).0);
    }

    #[test]
    fn tree_over_both_two_vertex_graphs() {
        let t = build_double_tree(&[BitGraph::empty(2), BitGraph::complete(2)], &AdjunctSequence::default()).unwrap();
        assert_eq!(t.levels[1].len(), 1);
        assert_eq!(t.levels[2].len(), 2);
        for n in &t.levels[2] {
            assert_eq!(n.parent.as_ref().unwrap().index, 0);
            assert_eq!(n.adjunct.as_ref().unwrap().level, 1);
        }
        assert!(t.levels[1][0].on_main_branch);
    }

    #[test]
    fn tree_links_are_isomorphisms() {
        let chain = build_chain(ClassSpec::new(PatternSpec::Clique(4), PatternSpec::Jay(4), 6), BuildMethod::Extender)
            .unwrap();
        let level = &chain[6].members;
        assert_eq!(level.len(), 40);
        for seq in [AdjunctSequence::default(), AdjunctSequence::window(1, 16)] {
            let t = build_double_tree(level, &seq).unwrap();
            let t2 = build_double_tree(level, &seq).unwrap();
            assert_eq!(t.interior_count(), t2.interior_count());
            assert!(t.levels[6].iter().all(|n| n.on_main_branch));
            for z in 2..=6 {
                let keep = adjunct_vertices(z, &seq).unwrap();
                for n in &t.levels[z] {
                    let p = n.parent.as_ref().unwrap();
                    let sub = parent(&n.g).unwrap();
                    assert_eq!(sub.permuted(&p.map), t.node(p.level, p.index).g);
                    let a = n.adjunct.as_ref().unwrap();
                    let sub = n.g.induced_ordered(&keep);
                    assert_eq!(sub.permuted(&a.map), t.node(a.level, a.index).g);
                }
            }
        }
    }
}
