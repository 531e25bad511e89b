//! Degree window, the same-degree pair lemma, and lower-bound witnesses.

use serde::{Deserialize, Serialize};

use super::Target;
use crate::catalog::{ramsey_number, RamseyValue};
use crate::error::{Error, Result};
use crate::graph::{BitGraph, PatternSpec, VertexSet};

/// Every vertex of a member of the target class has degree in `min..=max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeBounds {
    pub min: usize,
    pub max: usize,
}

impl DegreeBounds {
    /// From the Ramsey numbers of the neighbourhood and non-neighbourhood
    /// pairs: `N(v)` has fewer than `r_nbr` vertices and `M(v)` fewer than `r_non`.
    pub fn from_ramsey(target: Target, r_nbr: usize, r_non: usize) -> Self {
        DegreeBounds { min: target.n.saturating_sub(r_non), max: r_nbr.saturating_sub(1) }
    }

    /// Both Ramsey numbers computed by the catalog builder. Only sensible for
    /// small targets; fails if either search hits `cap`.
    pub fn computed(target: Target, cap: usize) -> Result<Self> {
        let nbr = target.pair.neighbourhood();
        let non = target.pair.non_neighbourhood();
        let exact = |p: crate::graph::ForbiddenPair| match ramsey_number(p.p1, p.p2, cap) {
            RamseyValue::Exact(r) => Ok(r),
            v => Err(Error::Usage(format!("R{p} is {v} with cap {cap}"))),
        };
        Ok(Self::from_ramsey(target, exact(nbr)?, exact(non)?))
    }

    pub fn is_empty(self) -> bool {
        self.min > self.max
    }

    pub fn contains(self, d: usize) -> bool {
        (self.min..=self.max).contains(&d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Neighbourhood,
    NonNeighbourhood,
}

/// A vertex outside the degree window, with the forbidden structure its
/// neighbourhood (too high) or non-neighbourhood (too low) is forced to hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeViolation {
    pub vertex: usize,
    pub degree: usize,
    pub side: Side,
    /// The pattern as seen on the subgraph and its vertices in `f`'s
    /// labelling. `None` would mean the supplied bound is wrong.
    pub structure: Option<(PatternSpec, Vec<usize>)>,
}

/// Checks every degree against `bounds`; the first offending vertex is reported.
pub fn check_degree_bounds(f: &BitGraph, target: Target, bounds: DegreeBounds) -> Result<(), DegreeViolation> {
    for v in 0..f.n() {
        let d = f.degree(v);
        if bounds.contains(d) {
            continue;
        }
        let (side, pair, verts) = if d > bounds.max {
            (Side::Neighbourhood, target.pair.neighbourhood(), f.neighbors(v))
        } else {
            (Side::NonNeighbourhood, target.pair.non_neighbourhood(), f.vertices().without(v).difference(f.neighbors(v)))
        };
        let (sub, map) = f.induced(verts);
        let structure = pair.violation(&sub).map(|(p, s)| (p, s.iter().map(|x| map[x]).collect()));
        return Err(DegreeViolation { vertex: v, degree: d, side, structure });
    }
    Ok(())
}

/// A degree shared by an adjacent pair and by a non-adjacent pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWitness {
    pub degree: usize,
    pub adjacent: (usize, usize),
    pub non_adjacent: (usize, usize),
}

/// Smallest degree with both kinds of pair, by direct search.
pub fn same_degree_pair_lemma(f: &BitGraph) -> Option<PairWitness> {
    let degs = f.degrees();
    let mut values: Vec<usize> = degs.clone();
    values.sort_unstable();
    values.dedup();
    for d in values {
        let class: Vec<usize> = (0..f.n()).filter(|&v| degs[v] == d).collect();
        let mut adjacent = None;
        let mut non_adjacent = None;
        for (i, &u) in class.iter().enumerate() {
            for &v in &class[i + 1..] {
                let slot = if f.has_edge(u, v) { &mut adjacent } else { &mut non_adjacent };
                slot.get_or_insert((u, v));
            }
        }
        if let (Some(adjacent), Some(non_adjacent)) = (adjacent, non_adjacent) {
            return Some(PairWitness { degree: d, adjacent, non_adjacent });
        }
    }
    None
}

/// Handshake parity: a degree multiset `(degree, count)` is graphic only if
/// its degree sum is even.
pub fn parity_allows(counts: &[(usize, usize)]) -> bool {
    counts.iter().map(|&(d, c)| d * c).sum::<usize>() % 2 == 0
}

/// Smallest `s` such that neither `K_s` nor its complement is in the class,
/// so any `s` class members of one degree contain both kinds of pair.
pub fn forcing_class_size(target: Target) -> usize {
    (1..=crate::graph::MAX_VERTICES)
        .find(|&s| !target.pair.admits(&BitGraph::complete(s)) && !target.pair.admits(&BitGraph::empty(s)))
        .expect("both patterns are finite")
}

/// The counting half of the pair lemma.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaArgument {
    pub bounds: DegreeBounds,
    pub class_size: usize,
    /// Degree distributions (count per degree in the window) that keep every
    /// degree class below `class_size` and pass the parity check. The lemma
    /// holds exactly when this is empty.
    pub escapes: Vec<Vec<usize>>,
}

impl LemmaArgument {
    pub fn holds(&self) -> bool {
        self.escapes.is_empty()
    }
}

/// Exhausts every way of spreading `target.n` vertices over the degree
/// window with fewer than `class_size` per degree.
pub fn lemma_argument(target: Target, bounds: DegreeBounds) -> LemmaArgument {
    let class_size = forcing_class_size(target);
    let mut escapes = Vec::new();
    if !bounds.is_empty() {
        let width = bounds.max - bounds.min + 1;
        let mut counts = vec![0; width];
        spread(&mut counts, 0, target.n, class_size - 1, &mut |c| {
            let dist: Vec<(usize, usize)> = c.iter().enumerate().map(|(j, &k)| (bounds.min + j, k)).collect();
            if parity_allows(&dist) {
                escapes.push(c.to_vec());
            }
        });
    }
    LemmaArgument { bounds, class_size, escapes }
}

fn spread(counts: &mut [usize], at: usize, left: usize, cap: usize, visit: &mut dyn FnMut(&[usize])) {
    if at == counts.len() {
        if left == 0 {
            visit(counts);
        }
        return;
    }
    if left > cap * (counts.len() - at) {
        return;
    }
    for c in 0..=cap.min(left) {
        counts[at] = c;
        spread(counts, at + 1, left - c, cap, visit);
    }
    counts[at] = 0;
}

/// Result of checking a claimed lower-bound witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessCheck {
    /// The graph has `n - 1` vertices and lies in the class.
    Ok,
    WrongOrder { expected: usize, found: usize },
    /// A forbidden structure, as seen on the graph itself.
    Forbidden { pattern: PatternSpec, vertices: Vec<usize> },
}

/// Confirms that `g` shows `R(p1, p2) > target.n - 1`.
pub fn verify_lower_bound(g: &BitGraph, target: Target) -> WitnessCheck {
    if g.n() + 1 != target.n {
        return WitnessCheck::WrongOrder { expected: target.n - 1, found: g.n() };
    }
    match target.pair.violation(g) {
        None => WitnessCheck::Ok,
        Some((pattern, s)) => WitnessCheck::Forbidden { pattern, vertices: s.to_vec() },
    }
}

/// `VertexSet` helper for callers that want the structure as a set again.
pub fn as_set(vertices: &[usize]) -> VertexSet {
    VertexSet::from_iter_vertices(vertices.iter().copied())
}
