//! Gluing plus `t` extra vertices as one CNF formula.
//!
//! Variables are the open `A x B` pairs and every pair touching an added
//! vertex `w_j`, except `w_j a` and `w_j b`, which are absent by definition.
//! Each small vertex set that could carry a forbidden pattern gets clauses
//! demanding enough "good" pairs; added vertices are kept in lexicographic
//! order of their neighbourhoods in the base graph.

pub mod backend;
pub mod dimacs;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gluer::{GlueMode, GluingInstance};
use crate::graph::pattern::dense_subsets;
use crate::graph::{graph6, BitGraph, VertexSet};
use crate::interval::for_each_subset_of_size;
use backend::SatBackend;
use dimacs::{Cnf, SolverAnswer};

/// A gluing instance with `t` vertices to add.
#[derive(Clone, Debug)]
pub struct ExtensionProblem {
    pub inst: GluingInstance,
    pub t: usize,
}

#[derive(Clone, Debug)]
pub struct CnfFormula {
    pub cnf: Cnf,
    /// Vertex pair `(u, v)`, `u < v`, of the full layout to its variable.
    pub var_map: BTreeMap<(usize, usize), i32>,
    /// Edge variables are `1..=edge_vars`; the rest are ordering helpers.
    pub edge_vars: usize,
    /// Fixed edges: the base graph plus `t` isolated vertices.
    pub fixed: BitGraph,
}

impl CnfFormula {
    /// The graph a model describes.
    pub fn decode(&self, model: &[bool]) -> BitGraph {
        let mut g = self.fixed.clone();
        for (&(u, v), &x) in &self.var_map {
            if model[x as usize - 1] {
                g.add_edge(u, v);
            }
        }
        g
    }

    fn var(&self, u: usize, v: usize) -> i32 {
        self.var_map[&(u.min(v), u.max(v))]
    }
}

fn at_least(cnf: &mut Cnf, lits: &[i32], need: usize) {
    if need == 0 {
        return;
    }
    if need > lits.len() {
        cnf.add(Vec::new());
        return;
    }
    // Some good literal in every (v - need + 1)-subset.
    let size = lits.len() - need + 1;
    for_each_subset_of_size(VertexSet::full(lits.len()), size, &mut |s| {
        cnf.add(s.iter().map(|i| lits[i]).collect());
    });
}

/// Lexicographic `x <= y`, most significant bit first.
pub fn lex_leq(cnf: &mut Cnf, x: &[i32], y: &[i32]) {
    let n = x.len();
    let mut eq: Option<i32> = None;
    for i in 0..n {
        let pre: Vec<i32> = eq.map(|e| vec![-e]).unwrap_or_default();
        let mut c = pre.clone();
        c.extend([-x[i], y[i]]);
        cnf.add(c);
        if i + 1 < n {
            let e = cnf.fresh();
            let mut c = pre.clone();
            c.extend([x[i], y[i], e]);
            cnf.add(c);
            let mut c = pre;
            c.extend([-x[i], -y[i], e]);
            cnf.add(c);
            eq = Some(e);
        }
    }
}

/// The formula for `problem`. With `ordering` the added vertices are
/// sorted by their base neighbourhoods.
pub fn encode(problem: &ExtensionProblem, mode: GlueMode, ordering: bool) -> CnfFormula {
    let pair = mode.pair();
    let inst = &problem.inst;
    let base = inst.base_graph();
    let (na, nb) = inst.sides();
    let nbase = base.n();
    let first_a = 2 + inst.k();
    let n = nbase + problem.t;

    let mut fixed = base.clone();
    for _ in 0..problem.t {
        fixed = fixed.with_vertex(VertexSet::EMPTY);
    }
    let mut cnf = Cnf::default();
    let mut var_map = BTreeMap::new();
    for i in 0..na {
        for j in 0..nb {
            var_map.insert((first_a + i, first_a + na + j), cnf.fresh());
        }
    }
    for w in nbase..n {
        for u in 2..w {
            var_map.insert((u, w), cnf.fresh());
        }
    }
    let edge_vars = cnf.vars;
    let mut var_rows = vec![0u64; n];
    for &(u, v) in var_map.keys() {
        var_rows[u] |= 1 << v;
        var_rows[v] |= 1 << u;
    }

    let mut f = CnfFormula { cnf, var_map, edge_vars, fixed };
    for p in pair.graph_patterns() {
        let side = if p.on_complement() { f.fixed.complement() } else { f.fixed.clone() };
        let rows: Vec<u64> = side.adjacency().iter().zip(&var_rows).map(|(r, v)| r | v).collect();
        // Present pairs are good for complement-side patterns.
        let sign = if p.on_complement() { 1 } else { -1 };
        let mut sets = Vec::new();
        dense_subsets(&rows, f.fixed.vertices(), p.order(), p.slack(), &mut |s, missing| {
            sets.push((s, missing));
            true
        });
        for (s, missing) in sets {
            let mut lits = Vec::new();
            for u in s {
                for v in s.iter().filter(|&v| v > u) {
                    if let Some(&x) = f.var_map.get(&(u, v)) {
                        lits.push(sign * x);
                    }
                }
            }
            at_least(&mut f.cnf, &lits, p.slack() + 1 - missing);
        }
    }
    if ordering {
        for w in nbase..n.saturating_sub(1) {
            let x: Vec<i32> = (2..nbase).map(|u| f.var(u, w)).collect();
            let y: Vec<i32> = (2..nbase).map(|u| f.var(u, w + 1)).collect();
            lex_leq(&mut f.cnf, &x, &y);
        }
    }
    f
}

/// Every model, restricted to edge variables, by adding blocking clauses.
/// Stops after `limit` models; the flag tells whether the list is complete.
pub fn enumerate_models(f: &CnfFormula, backend: &dyn SatBackend, limit: usize) -> Result<(Vec<Vec<bool>>, bool)> {
    backend.enumerate(&f.cnf, f.edge_vars, limit)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepStatus {
    Sat,
    Unsat,
    Unknown,
    /// The solver's model decodes to a graph that breaks the pair.
    InvalidModel,
    Failed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub status: StepStatus,
    pub vars: usize,
    pub clauses: usize,
    pub seconds: f64,
    /// The decoded graph for a satisfiable step.
    pub graph6: Option<String>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    /// Largest satisfiable `t`; `-1` when even the gluing is impossible.
    pub max_t: i64,
    /// The loop stopped at the cap while still satisfiable.
    pub capped: bool,
    /// The loop stopped on an unknown or failed step.
    pub unresolved: bool,
    pub steps: Vec<StepRecord>,
}

/// Raises `t` from zero until the formula becomes unsatisfiable or `t`
/// passes `cap`. Every model is decoded and re-checked before it counts.
pub fn solve_loop(inst: &GluingInstance, mode: GlueMode, backend: &dyn SatBackend, cap: usize) -> SolveReport {
    let pair = mode.pair();
    let mut report = SolveReport { max_t: -1, capped: false, unresolved: false, steps: Vec::new() };
    for t in 0..=cap {
        let start = Instant::now();
        let f = encode(&ExtensionProblem { inst: inst.clone(), t }, mode, true);
        let mut rec = StepRecord {
            t,
            status: StepStatus::Failed,
            vars: f.cnf.vars,
            clauses: f.cnf.clauses.len(),
            seconds: 0.0,
            graph6: None,
            note: None,
        };
        let answer = backend.solve(&f.cnf);
        rec.seconds = start.elapsed().as_secs_f64();
        let stop = match answer {
            Ok(SolverAnswer::Sat(model)) => {
                let g = f.decode(&model);
                rec.graph6 = Some(graph6::encode(&g));
                if pair.admits(&g) {
                    rec.status = StepStatus::Sat;
                    report.max_t = t as i64;
                    false
                } else {
                    rec.status = StepStatus::InvalidModel;
                    report.unresolved = true;
                    true
                }
            }
            Ok(SolverAnswer::Unsat) => {
                rec.status = StepStatus::Unsat;
                true
            }
            Ok(SolverAnswer::Unknown(why)) => {
                rec.status = StepStatus::Unknown;
                rec.note = Some(why);
                report.unresolved = true;
                true
            }
            Err(e) => {
                rec.note = Some(e.to_string());
                report.unresolved = true;
                true
            }
        };
        report.steps.push(rec);
        if stop {
            return report;
        }
    }
    report.capped = true;
    report
}
