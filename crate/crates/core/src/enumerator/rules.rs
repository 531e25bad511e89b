//! Cone-assignment rules for the direction that fixes `G2`.
//!
//! Each vertex `v_i` of `G1` gets a cone `C_i ⊆ G2`. Together with cone
//! feasibility, the six rules below are exactly the conditions for the
//! assembled graph to have no `K4` and no 5-set with at most one edge.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::cones::sparse_triples;
use crate::graph::{BitGraph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    K2,
    E2,
    E3,
    E4,
    J3,
    J4,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::K2 => "k2",
            Rule::E2 => "e2",
            Rule::E3 => "e3",
            Rule::E4 => "e4",
            Rule::J3 => "j3",
            Rule::J4 => "j4",
        };
        f.write_str(s)
    }
}

/// A broken rule with the `G1` vertices that trigger it and the `G2`
/// vertices it fails on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub g1_vertices: Vec<usize>,
    pub g2_vertices: Vec<usize>,
}

/// Precomputed structure of a fixed `G2`.
#[derive(Clone, Debug)]
pub struct G2Rules {
    n: usize,
    edges: Vec<VertexSet>,
    non_edges: Vec<VertexSet>,
    /// 3-sets with at most one edge.
    sparse3: Vec<VertexSet>,
}

impl G2Rules {
    pub fn new(g2: &BitGraph) -> Self {
        let n = g2.n();
        let mut edges = Vec::new();
        let mut non_edges = Vec::new();
        for j in 1..n {
            for i in 0..j {
                let s = VertexSet::singleton(i).with(j);
                if g2.has_edge(i, j) {
                    edges.push(s);
                } else {
                    non_edges.push(s);
                }
            }
        }
        G2Rules { n, edges, non_edges, sparse3: sparse_triples(g2, 1) }
    }

    fn violation(rule: Rule, g1: &[usize], g2: VertexSet) -> Violation {
        Violation { rule, g1_vertices: g1.to_vec(), g2_vertices: g2.to_vec() }
    }

    fn pair(&self, g1: &BitGraph, cones: &[VertexSet], i: usize, j: usize) -> Result<(), Violation> {
        if g1.has_edge(i, j) {
            let common = cones[i].intersection(cones[j]);
            if let Some(e) = self.edges.iter().find(|e| e.is_subset(common)) {
                return Err(Self::violation(Rule::K2, &[i, j], *e));
            }
        } else {
            let covered = cones[i].union(cones[j]);
            if let Some(t) = self.sparse3.iter().find(|t| t.is_disjoint(covered)) {
                return Err(Self::violation(Rule::E2, &[i, j], *t));
            }
        }
        Ok(())
    }

    fn triple(&self, g1: &BitGraph, cones: &[VertexSet], t: [usize; 3]) -> Result<(), Violation> {
        let e = g1.edges_within(VertexSet::from_iter_vertices(t));
        if e > 1 {
            return Ok(());
        }
        let hits = |p: VertexSet| t.iter().map(|&x| cones[x].intersection(p).len()).sum::<usize>();
        if e == 0 {
            if let Some(p) = self.edges.iter().find(|&&p| hits(p) < 1) {
                return Err(Self::violation(Rule::E3, &t, *p));
            }
            if let Some(p) = self.non_edges.iter().find(|&&p| hits(p) < 2) {
                return Err(Self::violation(Rule::E3, &t, *p));
            }
        } else {
            let covered = cones[t[0]].union(cones[t[1]]).union(cones[t[2]]);
            if let Some(p) = self.non_edges.iter().find(|p| p.is_disjoint(covered)) {
                return Err(Self::violation(Rule::J3, &t, *p));
            }
        }
        Ok(())
    }

    fn quad(&self, g1: &BitGraph, cones: &[VertexSet], q: [usize; 4]) -> Result<(), Violation> {
        let e = g1.edges_within(VertexSet::from_iter_vertices(q));
        if e > 1 {
            return Ok(());
        }
        let need = if e == 0 { 2 } else { 1 };
        for u in 0..self.n {
            let c = q.iter().filter(|&&x| cones[x].contains(u)).count();
            if c < need {
                let rule = if e == 0 { Rule::E4 } else { Rule::J4 };
                return Err(Self::violation(rule, &q, VertexSet::singleton(u)));
            }
        }
        Ok(())
    }

    /// Every rule instance that involves vertex `z` of `g1`, against the
    /// earlier vertices `0..z`.
    pub fn check_vertex(&self, g1: &BitGraph, cones: &[VertexSet], z: usize) -> Result<(), Violation> {
        for i in 0..z {
            self.pair(g1, cones, i, z)?;
        }
        for j in 1..z {
            for i in 0..j {
                self.triple(g1, cones, [i, j, z])?;
            }
        }
        for k in 2..z {
            for j in 1..k {
                for i in 0..j {
                    self.quad(g1, cones, [i, j, k, z])?;
                }
            }
        }
        Ok(())
    }

    /// All six rules over the whole assignment.
    pub fn check_all(&self, g1: &BitGraph, cones: &[VertexSet]) -> Result<(), Violation> {
        assert_eq!(cones.len(), g1.n(), "one cone per vertex of G1");
        for z in 0..g1.n() {
            self.check_vertex(g1, cones, z)?;
        }
        Ok(())
    }
}

/// Checks the six rules for `g1` with cones `cones` into `g2`.
pub fn check_unprimed_rules(g1: &BitGraph, g2: &BitGraph, cones: &[VertexSet]) -> Result<(), Violation> {
    G2Rules::new(g2).check_all(g1, cones)
}

/// `v` + `G1` + `G2` with `v` joined to `G1` and vertex `i` of `G1` joined to `cones[i]`.
/// Vertex order: `v`, then `G1`, then `G2`.
pub fn assemble(g1: &BitGraph, g2: &BitGraph, cones: &[VertexSet]) -> BitGraph {
    let (m, m2) = (g1.n(), g2.n());
    let mut g = BitGraph::empty(1 + m + m2);
    for i in 0..m {
        g.add_edge(0, 1 + i);
    }
    for (i, j) in g1.edges() {
        g.add_edge(1 + i, 1 + j);
    }
    for (i, j) in g2.edges() {
        g.add_edge(1 + m + i, 1 + m + j);
    }
    for (i, c) in cones.iter().enumerate() {
        for u in *c {
            g.add_edge(1 + i, 1 + m + u);
        }
    }
    g
}
