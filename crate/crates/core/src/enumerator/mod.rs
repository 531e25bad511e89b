//! Gluing enumeration of `R_G(K4, J5, ℓ)` along one vertex `v`.
//!
//! `v` splits a member into its neighbourhood `G1 ∈ R_G(K3, J5)` and its
//! non-neighbourhood `G2 ∈ R_G(K4, J4)`. One side is fixed and the other is
//! grown along a double tree of induced subgraphs, carrying the possible
//! cones of each vertex as cells.

pub mod collapse;
pub mod cones;
pub mod rules;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{ClassSpec, ClassStore, GraphClass};
use crate::error::{Error, Result};
use crate::graph::{BitGraph, PatternSpec, VertexSet};
use crate::interval::Interval;
use collapse::{collapse_cell, split_to_cones, CollapseRun, G1Shape, NodeShape, SweepOrder};
use cones::{feasible_cones_into_g1, feasible_cones_into_g2, minimal_cones, partition_intervals};
use rules::{assemble, G2Rules};
pub use tree::{adjunct, build_double_tree, parent, AdjunctSequence, DoubleTree};
use tree::{grow_cells, CellRules, GrowStats, TreeNode};

/// Largest order of a member of either side class.
pub const MAX_SIDE: usize = 10;

/// `(K4, J5)`, the class being enumerated.
pub const TARGET: (PatternSpec, PatternSpec) = (PatternSpec::Clique(4), PatternSpec::Jay(5));

/// Which side graph is fixed while the other grows along the tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Fix `G1`, grow `G2` with interval cells.
    FixG1,
    /// Fix `G2`, grow `G1` with cone cells.
    FixG2,
    /// Fix whichever side has fewer graphs, per `m`.
    #[default]
    Auto,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::FixG1 => "fix_g1",
            Direction::FixG2 => "fix_g2",
            Direction::Auto => "auto",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "fix_g1" => Ok(Direction::FixG1),
            "fix_g2" => Ok(Direction::FixG2),
            "auto" => Ok(Direction::Auto),
            _ => Err(Error::Usage(format!("unknown direction `{s}` (fix_g1, fix_g2, auto)"))),
        }
    }
}

/// The side classes `R_G(K3, J5, m)` and `R_G(K4, J4, m)` for `m ≤ 10`.
#[derive(Clone, Debug)]
pub struct SideClasses {
    pub k3j5: Vec<GraphClass>,
    pub k4j4: Vec<GraphClass>,
}

impl SideClasses {
    pub fn k3j5_spec(n: usize) -> ClassSpec {
        ClassSpec::new(PatternSpec::Clique(3), PatternSpec::Jay(5), n)
    }

    pub fn k4j4_spec(n: usize) -> ClassSpec {
        ClassSpec::new(PatternSpec::Clique(4), PatternSpec::Jay(4), n)
    }

    /// Builds both chains in memory.
    pub fn build() -> Result<Self> {
        let method = Default::default();
        Ok(SideClasses {
            k3j5: crate::catalog::build_chain(Self::k3j5_spec(MAX_SIDE), method)?,
            k4j4: crate::catalog::build_chain(Self::k4j4_spec(MAX_SIDE), method)?,
        })
    }

    /// Loads both chains from `store`; a missing class is an error.
    pub fn from_store(store: &ClassStore) -> Result<Self> {
        let load = |f: fn(usize) -> ClassSpec| (0..=MAX_SIDE).map(|n| store.require(f(n))).collect::<Result<Vec<_>>>();
        Ok(SideClasses { k3j5: load(Self::k3j5_spec)?, k4j4: load(Self::k4j4_spec)? })
    }

    fn side(&self, fix_g1: bool, n: usize) -> &[BitGraph] {
        let chain = if fix_g1 { &self.k3j5 } else { &self.k4j4 };
        chain.get(n).map_or(&[], |c| &c.members)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnumerateOptions {
    pub direction: Direction,
    pub seq: AdjunctSequence,
    pub order: SweepOrder,
    /// Restricts the degree of the glued vertex, for split runs.
    pub only_m: Option<usize>,
    /// Keep a gluing only when the glued vertex has maximum degree. Every
    /// graph still appears once per degree class of its maximum-degree
    /// vertices, so nothing is lost, and most leaves skip canonical labelling.
    pub max_degree_only: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { direction: Direction::Auto, seq: AdjunctSequence::default(), order: SweepOrder::default(), only_m: None, max_degree_only: true }
    }
}

/// Counters for one value of `m`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DegreeStats {
    pub m: usize,
    pub direction: Option<Direction>,
    pub fixed_graphs: usize,
    pub tree_nodes: usize,
    pub grow: GrowStats,
    pub collapse_sweeps: usize,
    pub leaves: usize,
    pub glued: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct EnumStats {
    pub per_m: Vec<DegreeStats>,
    pub outputs: usize,
}

/// Window of degrees of the glued vertex: `ℓ - 11 ≤ m ≤ 10`, `m < ℓ`.
pub fn degree_window(l: usize) -> std::ops::RangeInclusive<usize> {
    l.saturating_sub(MAX_SIDE + 1)..=MAX_SIDE.min(l.saturating_sub(1))
}

struct FixG1<'a> {
    shape: &'a G1Shape,
    parts: &'a [Interval],
    nodes: &'a [Vec<NodeShape>],
    order: SweepOrder,
    sweeps: std::cell::Cell<usize>,
}

#[derive(Clone)]
struct IntervalCell {
    iv: Vec<Interval>,
    origin: Vec<u16>,
}

impl CellRules for FixG1<'_> {
    type Cell = IntervalCell;
    type Key = Vec<u16>;

    fn initial(&self) -> Vec<IntervalCell> {
        (0..self.parts.len()).map(|i| IntervalCell { iv: vec![self.parts[i]], origin: vec![i as u16] }).collect()
    }

    fn transport(&self, c: &IntervalCell, map: &[usize]) -> IntervalCell {
        IntervalCell { iv: map.iter().map(|&j| c.iv[j]).collect(), origin: map.iter().map(|&j| c.origin[j]).collect() }
    }

    fn key(&self, c: &IntervalCell, k: usize) -> Vec<u16> {
        c.origin[..k].to_vec()
    }

    fn join(&self, at: (usize, usize), _: &TreeNode, p: &IntervalCell, a: &IntervalCell, k: usize) -> Option<IntervalCell> {
        let mut iv: Vec<Interval> = (0..k).map(|j| p.iv[j].intersect(a.iv[j])).collect();
        iv.extend_from_slice(&p.iv[k..]);
        iv.push(a.iv[k]);
        let mut origin = p.origin.clone();
        origin.push(a.origin[k]);
        let mut run = CollapseRun::default();
        let ok = collapse_cell(self.shape, &self.nodes[at.0][at.1], &mut iv, self.order, &mut run);
        self.sweeps.set(self.sweeps.get() + run.sweeps);
        ok.then_some(IntervalCell { iv, origin })
    }
}

struct FixG2<'a> {
    cones: &'a [VertexSet],
    rules: &'a G2Rules,
}

impl CellRules for FixG2<'_> {
    type Cell = Vec<VertexSet>;
    type Key = Vec<VertexSet>;

    fn initial(&self) -> Vec<Vec<VertexSet>> {
        self.cones.iter().map(|&c| vec![c]).collect()
    }

    fn transport(&self, c: &Vec<VertexSet>, map: &[usize]) -> Vec<VertexSet> {
        map.iter().map(|&j| c[j]).collect()
    }

    fn key(&self, c: &Vec<VertexSet>, k: usize) -> Vec<VertexSet> {
        c[..k].to_vec()
    }

    fn join(&self, _: (usize, usize), node: &TreeNode, p: &Vec<VertexSet>, a: &Vec<VertexSet>, k: usize) -> Option<Vec<VertexSet>> {
        let mut c = p.clone();
        c.push(a[k]);
        self.rules.check_vertex(&node.g, &c, c.len() - 1).ok().map(|_| c)
    }
}

/// Joins vertex 0 to `g1` only, with `cones[x]` the `g2`-neighbours of `x`.
fn glue_fix_g1(g1: &BitGraph, g2: &BitGraph, cones_into_g1: &[VertexSet]) -> BitGraph {
    let t: Vec<VertexSet> =
        (0..g1.n()).map(|x| (0..g2.n()).filter(|&i| cones_into_g1[i].contains(x)).collect()).collect();
    assemble(g1, g2, &t)
}

fn canonical_members(graphs: Vec<BitGraph>, l: usize) -> GraphClass {
    GraphClass::from_members(ClassSpec::new(TARGET.0, TARGET.1, l), graphs)
}

fn run_degree(l: usize, m: usize, sides: &SideClasses, opts: &EnumerateOptions) -> Result<(Vec<BitGraph>, DegreeStats)> {
    let pair = ClassSpec::new(TARGET.0, TARGET.1, l).pair();
    let keep = |g: &BitGraph| {
        (!opts.max_degree_only || (1..g.n()).all(|u| g.degree(u) <= m)) && pair.admits(g)
    };
    let m2 = l - 1 - m;
    let g1s = sides.side(true, m);
    let g2s = sides.side(false, m2);
    let mut st = DegreeStats { m, ..Default::default() };
    if g1s.is_empty() || g2s.is_empty() {
        return Ok((Vec::new(), st));
    }
    if m == 0 || m2 == 0 {
        // One side is empty: the glued vertex is isolated or dominating.
        let out: Vec<BitGraph> = g1s
            .iter()
            .flat_map(|g1| g2s.iter().map(move |g2| assemble(g1, g2, &vec![g2.vertices(); g1.n()])))
            .filter(|g| keep(g))
            .collect();
        st.glued = out.len();
        return Ok((out, st));
    }
    let direction = match opts.direction {
        Direction::Auto if g1s.len() <= g2s.len() => Direction::FixG1,
        Direction::Auto => Direction::FixG2,
        d => d,
    };
    st.direction = Some(direction);
    let fix_g1 = direction == Direction::FixG1;
    let (fixed, grown) = if fix_g1 { (g1s, g2s) } else { (g2s, g1s) };
    st.fixed_graphs = fixed.len();
    let tree = build_double_tree(grown, &opts.seq)?;
    st.tree_nodes = tree.node_count();
    let shapes: Vec<Vec<NodeShape>> =
        tree.levels.iter().map(|l| l.iter().map(|n| NodeShape::new(&n.g)).collect()).collect();

    let results: Vec<(Vec<BitGraph>, DegreeStats)> = fixed
        .par_iter()
        .map(|f| {
            let mut s = DegreeStats::default();
            let mut out = Vec::new();
            if fix_g1 {
                let shape = G1Shape::new(f);
                let cones = feasible_cones_into_g1(f);
                let parts = partition_intervals(&cones, &minimal_cones(&cones), f.vertices());
                let rules = FixG1 { shape: &shape, parts: &parts, nodes: &shapes, order: opts.order, sweeps: 0.into() };
                let tops = grow_cells(&tree, &rules, &mut s.grow);
                let mut run = CollapseRun::default();
                for (node, cells) in tree.levels[tree.top].iter().zip(tops) {
                    let ns = NodeShape::new(&node.g);
                    for c in cells {
                        let mut leaves = Vec::new();
                        split_to_cones(&shape, &ns, c.iv, opts.order, &mut run, &mut leaves);
                        s.leaves += leaves.len();
                        for cones in leaves {
                            let g = glue_fix_g1(f, &node.g, &cones);
                            if keep(&g) {
                                out.push(g);
                            }
                        }
                    }
                }
                s.collapse_sweeps = rules.sweeps.get() + run.sweeps;
            } else {
                let cones = feasible_cones_into_g2(f);
                let g2rules = G2Rules::new(f);
                let rules = FixG2 { cones: &cones, rules: &g2rules };
                let tops = grow_cells(&tree, &rules, &mut s.grow);
                for (node, cells) in tree.levels[tree.top].iter().zip(tops) {
                    s.leaves += cells.len();
                    for c in cells {
                        let g = assemble(&node.g, f, &c);
                        if keep(&g) {
                            out.push(g);
                        }
                    }
                }
            }
            s.glued = out.len();
            (canonical_members(out, l).members, s)
        })
        .collect();
    let mut all = Vec::new();
    for (g, s) in results {
        all.extend(g);
        st.grow.add(&s.grow);
        st.collapse_sweeps += s.collapse_sweeps;
        st.leaves += s.leaves;
        st.glued += s.glued;
    }
    Ok((all, st))
}

/// All of `R_G(K4, J5, ℓ)`, up to isomorphism, by gluing around one vertex
/// for every degree `m` in the window.
pub fn enumerate_r_k4_j5(l: usize, sides: &SideClasses, opts: &EnumerateOptions) -> Result<(GraphClass, EnumStats)> {
    if l == 0 {
        return Ok((GraphClass::base(ClassSpec::new(TARGET.0, TARGET.1, 0)), EnumStats::default()));
    }
    for m in degree_window(l) {
        for (chain, n) in [(&sides.k3j5, m), (&sides.k4j4, l - 1 - m)] {
            if chain.len() <= n && n <= MAX_SIDE {
                return Err(Error::Dependency(format!("side class of order {n} missing")));
            }
        }
    }
    let mut stats = EnumStats::default();
    let mut all = Vec::new();
    for m in degree_window(l) {
        if opts.only_m.is_some_and(|x| x != m) {
            continue;
        }
        let (g, s) = run_degree(l, m, sides, opts)?;
        all.extend(g);
        stats.per_m.push(s);
    }
    let class = canonical_members(all, l);
    stats.outputs = class.len();
    Ok((class, stats))
}
