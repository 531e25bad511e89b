//! Gluing two pointed neighbourhoods along their common part.
//!
//! Given `(G_a, b)` and `(G_b, a)` whose common neighbourhood `H` is matched
//! by an isomorphism, the only edges left open are those between
//! `A = G_b - H - a` and `B = G_a - H - b`. They live in a tri-state
//! matrix. Every small set that could become a forbidden pattern demands a
//! number of "good" cells (present or absent, depending on the pattern);
//! when a set can only just meet its demand, its remaining cells are forced.
//! The rest is branching.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::pattern::dense_subsets;
use crate::graph::canon::canonical_labelling_coloured;
use crate::graph::{automorphisms, canonical_labelling, graph6, isomorphism, BitGraph, ForbiddenPair, PatternSpec, VertexSet};

/// Which pair the glued graph must avoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlueMode {
    /// No `J6`, no independent 4-set.
    Original,
    /// No `K4`, no 6-set with at most one edge.
    Complement,
    /// Any pair, for scaled-down runs.
    Custom(ForbiddenPair),
}

impl GlueMode {
    pub fn pair(self) -> ForbiddenPair {
        match self {
            GlueMode::Original => ForbiddenPair::new(PatternSpec::Jay(6), PatternSpec::Clique(4)),
            GlueMode::Complement => ForbiddenPair::new(PatternSpec::Clique(4), PatternSpec::Jay(6)),
            GlueMode::Custom(p) => p,
        }
    }
}

impl fmt::Display for GlueMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GlueMode::Original => f.write_str("original"),
            GlueMode::Complement => f.write_str("complement"),
            GlueMode::Custom(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for GlueMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(GlueMode::Original),
            "complement" => Ok(GlueMode::Complement),
            _ => {
                let parts: Vec<&str> = s.trim_matches(|c| c == '(' || c == ')').split(',').map(str::trim).collect();
                match parts.as_slice() {
                    [p1, p2] => Ok(GlueMode::Custom(ForbiddenPair::new(p1.parse()?, p2.parse()?))),
                    _ => Err(Error::Usage(format!("unknown glue mode `{s}` (original, complement, or `K3,J4`)"))),
                }
            }
        }
    }
}

/// Which Unknown cell the gluer splits on. Any choice is sound; the
/// search tree size is what changes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branching {
    /// The first Unknown cell in row-major order.
    LowestIndex,
    /// The Unknown cell in the most sets that are one cell from forcing.
    #[default]
    MostConstrained,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueOptions {
    /// In original mode, also use near-clique 6-sets with three or more
    /// vertices of `H`. Valid inputs never need them.
    pub include_r3: bool,
    #[serde(default)]
    pub branching: Branching,
}

/// One way of putting `G_a` and `G_b` together.
///
/// Layout of the glued graph: `a`, `b`, then `H`, then `A`, then `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingInstance {
    pub h: BitGraph,
    pub ga: BitGraph,
    /// The vertex `b` inside `ga`.
    pub b: usize,
    pub gb: BitGraph,
    /// The vertex `a` inside `gb`.
    pub a: usize,
    /// `ha[j]` is the `ga` vertex playing `h_j`.
    pub ha: Vec<usize>,
    /// `hb[j]` is the `gb` vertex playing `h_j`.
    pub hb: Vec<usize>,
}

impl GluingInstance {
    pub fn new(ga: BitGraph, b: usize, gb: BitGraph, a: usize, ha: Vec<usize>, hb: Vec<usize>) -> Result<Self> {
        if b >= ga.n() || a >= gb.n() || ha.len() != hb.len() {
            return Err(Error::Usage("pointed vertex or embedding out of range".into()));
        }
        let h = ga.induced_ordered(&ha);
        if gb.induced_ordered(&hb) != h {
            return Err(Error::Usage("the two embeddings induce different graphs".into()));
        }
        if VertexSet::from_iter_vertices(ha.iter().copied()) != ga.neighbors(b)
            || VertexSet::from_iter_vertices(hb.iter().copied()) != gb.neighbors(a)
        {
            return Err(Error::Usage("H must be exactly the neighbourhood of the pointed vertex".into()));
        }
        Ok(GluingInstance { h, ga, b, gb, a, ha, hb })
    }

    pub fn k(&self) -> usize {
        self.h.n()
    }

    fn a_side(&self) -> Vec<usize> {
        let used = VertexSet::from_iter_vertices(self.hb.iter().copied()).with(self.a);
        self.gb.vertices().difference(used).to_vec()
    }

    fn b_side(&self) -> Vec<usize> {
        let used = VertexSet::from_iter_vertices(self.ha.iter().copied()).with(self.b);
        self.ga.vertices().difference(used).to_vec()
    }

    /// `(|A|, |B|)`.
    pub fn sides(&self) -> (usize, usize) {
        (self.a_side().len(), self.b_side().len())
    }

    /// The glued graph with no `A`-`B` edges.
    pub fn base_graph(&self) -> BitGraph {
        let k = self.k();
        let (av, bv) = (self.a_side(), self.b_side());
        let n = 2 + k + av.len() + bv.len();
        let mut g = BitGraph::empty(n);
        // gb-vertex -> glued index, then ga-vertex -> glued index.
        let mut from_b = vec![usize::MAX; self.gb.n()];
        let mut from_a = vec![usize::MAX; self.ga.n()];
        from_b[self.a] = 0;
        from_a[self.b] = 1;
        for j in 0..k {
            from_b[self.hb[j]] = 2 + j;
            from_a[self.ha[j]] = 2 + j;
        }
        for (i, &v) in av.iter().enumerate() {
            from_b[v] = 2 + k + i;
        }
        for (i, &v) in bv.iter().enumerate() {
            from_a[v] = 2 + k + av.len() + i;
        }
        for (u, v) in self.gb.edges() {
            g.add_edge(from_b[u], from_b[v]);
        }
        for (u, v) in self.ga.edges() {
            g.add_edge(from_a[u], from_a[v]);
        }
        // a is joined to all of G_a, b to all of G_b.
        for v in 0..self.ga.n() {
            g.add_edge(0, from_a[v]);
        }
        for v in 0..self.gb.n() {
            g.add_edge(1, from_b[v]);
        }
        g
    }
}

/// Every instance for two pointed graphs: one per isomorphism between the
/// two copies of `H`. Empty when the neighbourhoods are not isomorphic.
pub fn connections(ga: &BitGraph, b: usize, gb: &BitGraph, a: usize) -> Result<Vec<GluingInstance>> {
    let hav = ga.neighbors(b).to_vec();
    let hbv = gb.neighbors(a).to_vec();
    let h = ga.induced_ordered(&hav);
    let hgb = gb.induced_ordered(&hbv);
    let Some(iso) = isomorphism(&h, &hgb) else {
        return Ok(Vec::new());
    };
    automorphisms(&h)
        .into_iter()
        .map(|sigma| {
            let hb = (0..h.n()).map(|j| hbv[iso[sigma[j]]]).collect();
            GluingInstance::new(ga.clone(), b, gb.clone(), a, hav.clone(), hb)
        })
        .collect()
}

/// Automorphisms of `g` fixing `p`, restricted to `N(p)` and written on
/// positions in the ascending neighbour list.
fn stabiliser_on_neighbours(g: &BitGraph, p: usize) -> Vec<Vec<usize>> {
    let nb = g.neighbors(p).to_vec();
    let colours = [VertexSet::singleton(p), g.vertices().without(p)];
    let lab = canonical_labelling_coloured(g, &colours);
    lab.generators
        .iter()
        .map(|gen| nb.iter().map(|&v| nb.iter().position(|&w| w == gen[v]).expect("fixes p")).collect())
        .collect()
}

/// Like [`connections`], but one instance per orbit of the identifications
/// `N(b) -> N(a)` under automorphisms of `G_a` fixing `b` and of `G_b`
/// fixing `a`. Instances in one orbit glue to the same graphs up to an
/// isomorphism fixing `a` and `b`, so nothing is lost.
pub fn connections_reduced(ga: &BitGraph, b: usize, gb: &BitGraph, a: usize) -> Result<Vec<GluingInstance>> {
    let all = connections(ga, b, gb, a)?;
    if all.len() <= 1 {
        return Ok(all);
    }
    let hbv = gb.neighbors(a).to_vec();
    let hav = ga.neighbors(b).to_vec();
    // phi[j] = position in hbv of the partner of hav[j].
    let phi_of = |inst: &GluingInstance| -> Vec<usize> {
        hav.iter()
            .map(|&v| {
                let j = inst.ha.iter().position(|&x| x == v).expect("ha covers N(b)");
                hbv.iter().position(|&w| w == inst.hb[j]).expect("hb covers N(a)")
            })
            .collect()
    };
    let left = stabiliser_on_neighbours(ga, b);
    let right = stabiliser_on_neighbours(gb, a);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for inst in all {
        let phi = phi_of(&inst);
        if seen.contains(&phi) {
            continue;
        }
        let mut queue = vec![phi.clone()];
        seen.insert(phi);
        while let Some(p) = queue.pop() {
            let images = left
                .iter()
                .map(|al| al.iter().map(|&j| p[j]).collect::<Vec<usize>>())
                .chain(right.iter().map(|be| p.iter().map(|&x| be[x]).collect()));
            for q in images {
                if seen.insert(q.clone()) {
                    queue.push(q);
                }
            }
        }
        out.push(inst);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tri {
    Unknown,
    True,
    False,
}

impl Tri {
    fn of(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }
}

/// Row-major `|A| x |B|` matrix; cell `(i, j)` is the edge `a_i b_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriStateMatrix {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<Tri>,
}

impl TriStateMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        TriStateMatrix { rows, cols, cells: vec![Tri::Unknown; rows * cols] }
    }

    pub fn get(&self, i: usize, j: usize) -> Tri {
        self.cells[i * self.cols + j]
    }

    pub fn unknowns(&self) -> usize {
        self.cells.iter().filter(|&&c| c == Tri::Unknown).count()
    }
}

/// A set of `r` vertices of `H`, `s` of `A` and `t` of `B` that could turn
/// into `pattern` unless at least `need` of its cells take the value `good`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialSet {
    /// Vertices in the glued layout.
    pub verts: VertexSet,
    pub r: usize,
    pub s: usize,
    pub t: usize,
    pub pattern: PatternSpec,
    /// Wrong pairs among the fixed (non `A x B`) pairs.
    pub fixed_wrong: usize,
    pub cells: Vec<u32>,
    pub good: bool,
    pub need: usize,
}

/// All potential sets of an instance for `pair`, grouped by pattern.
pub fn enumerate_potential_sets(inst: &GluingInstance, pair: ForbiddenPair, opts: GlueOptions, original: bool) -> Vec<PotentialSet> {
    let base = inst.base_graph();
    let k = inst.k();
    let (na, nb) = inst.sides();
    let h_set = VertexSet::full(2 + k).difference(VertexSet::full(2));
    let a_set = VertexSet::full(2 + k + na).difference(VertexSet::full(2 + k));
    let b_set = base.vertices().difference(VertexSet::full(2 + k + na));
    let cand = h_set.union(a_set).union(b_set);
    let cross_rows: Vec<u64> = (0..base.n())
        .map(|v| {
            if a_set.contains(v) {
                b_set.0
            } else if b_set.contains(v) {
                a_set.0
            } else {
                0
            }
        })
        .collect();
    let mut out = Vec::new();
    for (pi, p) in pair.graph_patterns().into_iter().enumerate() {
        // Look in the graph the pattern lives in, with every cross pair
        // counted as present; the missing count is then the fixed part.
        let side = if p.on_complement() { base.complement() } else { base.clone() };
        let rows: Vec<u64> = side.adjacency().iter().zip(&cross_rows).map(|(r, c)| r | c).collect();
        let good = p.on_complement();
        dense_subsets(&rows, cand, p.order(), p.slack(), &mut |set, missing| {
            let (r, s, t) =
                (set.intersection(h_set).len(), set.intersection(a_set).len(), set.intersection(b_set).len());
            if s == 0 || t == 0 {
                return true;
            }
            if original && pi == 0 && !opts.include_r3 && r >= 3 {
                return true;
            }
            let mut cells = Vec::new();
            for u in set.intersection(a_set) {
                for w in set.intersection(b_set) {
                    cells.push(((u - 2 - k) * nb + (w - 2 - k - na)) as u32);
                }
            }
            out.push(PotentialSet {
                verts: set,
                r,
                s,
                t,
                pattern: p,
                fixed_wrong: missing,
                cells,
                good,
                need: p.slack() + 1 - missing,
            });
            true
        });
    }
    out
}

/// Counters over one or many instances.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueTally {
    pub instances: usize,
    pub branches: usize,
    pub gluings: usize,
    pub contradictions: usize,
    /// Completed matrices rejected by the final check of the whole graph.
    pub rejected: usize,
    /// Instances whose search stopped at a gluing budget.
    #[serde(default)]
    pub truncated: usize,
}

impl GlueTally {
    pub fn add(&mut self, o: &GlueTally) {
        self.instances += o.instances;
        self.branches += o.branches;
        self.gluings += o.gluings;
        self.contradictions += o.contradictions;
        self.rejected += o.rejected;
        self.truncated += o.truncated;
    }
}

/// Sets plus the per-cell index used during propagation.
pub struct Propagator {
    pub sets: Vec<PotentialSet>,
    by_cell: Vec<Vec<u32>>,
}

/// A partial matrix with, per set, how many cells hold the good value
/// (`have`) and how many are still Unknown (`open`).
#[derive(Clone, Debug)]
pub struct SearchState {
    pub m: TriStateMatrix,
    have: Vec<u8>,
    open: Vec<u8>,
}

impl Propagator {
    pub fn new(sets: Vec<PotentialSet>, cells: usize) -> Self {
        let mut by_cell = vec![Vec::new(); cells];
        for (i, s) in sets.iter().enumerate() {
            for &c in &s.cells {
                by_cell[c as usize].push(i as u32);
            }
        }
        Propagator { sets, by_cell }
    }

    /// An all-Unknown state.
    pub fn state(&self, rows: usize, cols: usize) -> SearchState {
        SearchState {
            m: TriStateMatrix::new(rows, cols),
            have: vec![0; self.sets.len()],
            open: self.sets.iter().map(|s| s.cells.len() as u8).collect(),
        }
    }

    /// Sets an Unknown cell and queues it for [`Propagator::process_stack`].
    pub fn assign(&self, st: &mut SearchState, c: usize, v: Tri, stack: &mut Vec<u32>) {
        debug_assert_eq!(st.m.cells[c], Tri::Unknown);
        st.m.cells[c] = v;
        for &i in &self.by_cell[c] {
            let i = i as usize;
            st.open[i] -= 1;
            if v == Tri::of(self.sets[i].good) {
                st.have[i] += 1;
            }
        }
        stack.push(c as u32);
    }

    /// Forces what set `i` implies. `false` on contradiction.
    fn apply(&self, i: usize, st: &mut SearchState, stack: &mut Vec<u32>) -> bool {
        let s = &self.sets[i];
        let (have, open) = (st.have[i] as usize, st.open[i] as usize);
        if have >= s.need {
            return true;
        }
        if have + open < s.need {
            return false;
        }
        if have + open == s.need {
            let good = Tri::of(s.good);
            for &c in &s.cells {
                if st.m.cells[c as usize] == Tri::Unknown {
                    self.assign(st, c as usize, good, stack);
                }
            }
        }
        true
    }

    /// Evaluates every set once and returns the cells it forced.
    pub fn initialize(&self, st: &mut SearchState) -> Option<Vec<u32>> {
        let mut stack = Vec::new();
        for i in 0..self.sets.len() {
            if !self.apply(i, st, &mut stack) {
                return None;
            }
        }
        Some(stack)
    }

    /// The cell to split on, or `None` when nothing is Unknown.
    pub fn pick(&self, st: &SearchState, how: Branching) -> Option<usize> {
        let first = st.m.cells.iter().position(|&c| c == Tri::Unknown)?;
        if how == Branching::LowestIndex {
            return Some(first);
        }
        let mut score = vec![0u32; st.m.cells.len()];
        for (i, s) in self.sets.iter().enumerate() {
            let (have, open) = (st.have[i] as usize, st.open[i] as usize);
            if have < s.need && have + open == s.need + 1 {
                for &c in &s.cells {
                    if st.m.cells[c as usize] == Tri::Unknown {
                        score[c as usize] += 1;
                    }
                }
            }
        }
        (0..score.len())
            .filter(|&c| st.m.cells[c] == Tri::Unknown)
            .max_by_key(|&c| (score[c], std::cmp::Reverse(c)))
    }

    /// Runs the stack to a fixpoint. `false` on contradiction.
    pub fn process_stack(&self, st: &mut SearchState, stack: &mut Vec<u32>) -> bool {
        while let Some(c) = stack.pop() {
            for &i in &self.by_cell[c as usize] {
                if !self.apply(i as usize, st, stack) {
                    return false;
                }
            }
        }
        true
    }
}

fn complete(base: &BitGraph, first_a: usize, cols: usize, m: &TriStateMatrix) -> BitGraph {
    let mut g = base.clone();
    for i in 0..m.rows {
        for j in 0..cols {
            if m.get(i, j) == Tri::True {
                g.add_edge(first_a + i, first_a + m.rows + j);
            }
        }
    }
    g
}

/// Every completed matrix that passes the final check, as glued graphs in
/// the instance layout. Nothing is deduplicated.
pub fn glue_raw(inst: &GluingInstance, mode: GlueMode, opts: GlueOptions) -> (Vec<BitGraph>, GlueTally) {
    search(inst, mode, opts, None)
}

/// Stops a search after `max_gluings` gluings. Each split tries its two
/// values in a seeded random order, so the gluings kept are a random
/// corner of the tree rather than always the all-True one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueBudget {
    pub max_gluings: usize,
    pub seed: u64,
}

/// [`glue_raw`] under a budget. `tally.truncated` is 1 when it stopped with
/// branches left unexplored.
pub fn glue_sample(inst: &GluingInstance, mode: GlueMode, opts: GlueOptions, budget: GlueBudget) -> (Vec<BitGraph>, GlueTally) {
    search(inst, mode, opts, Some(budget))
}

fn search(inst: &GluingInstance, mode: GlueMode, opts: GlueOptions, budget: Option<GlueBudget>) -> (Vec<BitGraph>, GlueTally) {
    let mut rng = budget.map(|b| ChaCha8Rng::seed_from_u64(b.seed));
    let pair = mode.pair();
    let (na, nb) = inst.sides();
    let base = inst.base_graph();
    let first_a = 2 + inst.k();
    let prop = Propagator::new(enumerate_potential_sets(inst, pair, opts, mode == GlueMode::Original), na * nb);
    let mut tally = GlueTally { instances: 1, ..Default::default() };
    let mut found = Vec::new();

    let mut st = prop.state(na, nb);
    let Some(stack) = prop.initialize(&mut st) else {
        tally.contradictions += 1;
        return (found, tally);
    };
    let mut work = vec![(st, stack)];
    while let Some((mut st, mut stack)) = work.pop() {
        if budget.is_some_and(|b| found.len() >= b.max_gluings) {
            tally.truncated = 1;
            break;
        }
        tally.branches += 1;
        if !prop.process_stack(&mut st, &mut stack) {
            tally.contradictions += 1;
            continue;
        }
        match prop.pick(&st, opts.branching) {
            Some(c) => {
                // The first value is explored first, so it goes on the stack last.
                let first = if rng.as_mut().is_some_and(|r| r.gen_bool(0.5)) { Tri::False } else { Tri::True };
                let second = if first == Tri::True { Tri::False } else { Tri::True };
                let mut other = st.clone();
                let mut other_stack = Vec::new();
                prop.assign(&mut other, c, second, &mut other_stack);
                work.push((other, other_stack));
                let mut stack = Vec::new();
                prop.assign(&mut st, c, first, &mut stack);
                work.push((st, stack));
            }
            None => {
                let g = complete(&base, first_a, nb, &st.m);
                if pair.admits(&g) {
                    tally.gluings += 1;
                    found.push(g);
                } else {
                    tally.rejected += 1;
                }
            }
        }
    }
    (found, tally)
}

/// Every valid gluing of one instance, canonically labelled and deduplicated.
pub fn glue_all(inst: &GluingInstance, mode: GlueMode, opts: GlueOptions) -> (Vec<BitGraph>, GlueTally) {
    let (raw, tally) = glue_raw(inst, mode, opts);
    let mut found: BTreeMap<String, BitGraph> = BTreeMap::new();
    for g in raw {
        let canon = canonical_labelling(&g).graph;
        found.entry(graph6::encode(&canon)).or_insert(canon);
    }
    (found.into_values().collect(), tally)
}

/// Like [`glue_all`], but `a` and `b` stay the first two vertices, so the
/// results can seed an extension that must avoid them.
pub fn glue_all_pointed(inst: &GluingInstance, mode: GlueMode, opts: GlueOptions) -> (Vec<BitGraph>, GlueTally) {
    let (raw, tally) = glue_raw(inst, mode, opts);
    let mut found: BTreeMap<Vec<u8>, BitGraph> = BTreeMap::new();
    for g in raw {
        let (key, canon) = crate::extender::canonical_with_prefix(&g, 2);
        found.entry(key).or_insert(canon);
    }
    (found.into_values().collect(), tally)
}

/// Glues every instance in parallel and merges by canonical form.
pub fn glue_instances(insts: &[GluingInstance], mode: GlueMode, opts: GlueOptions) -> (Vec<BitGraph>, GlueTally) {
    let parts: Vec<(Vec<BitGraph>, GlueTally)> = insts.par_iter().map(|i| glue_all(i, mode, opts)).collect();
    let mut tally = GlueTally::default();
    let mut found: BTreeMap<String, BitGraph> = BTreeMap::new();
    for (gs, t) in parts {
        tally.add(&t);
        for g in gs {
            found.entry(graph6::encode(&g)).or_insert(g);
        }
    }
    (found.into_values().collect(), tally)
}

/// All pointed versions `(g, v)` of the graphs in `class` whose pointed
/// vertex has exactly `k` neighbours, one per vertex orbit.
pub fn pointed_graphs(class: &[BitGraph], k: usize) -> Vec<(BitGraph, usize)> {
    let mut out = Vec::new();
    for g in class {
        let lab = canonical_labelling(g);
        let reps = crate::graph::canon::orbit_leaders(g.n(), &lab.generators);
        for v in reps {
            if g.degree(v) == k {
                out.push((g.clone(), v));
            }
        }
    }
    out
}

/// Every instance between two lists of pointed graphs.
pub fn instances_between(side_a: &[(BitGraph, usize)], side_b: &[(BitGraph, usize)]) -> Result<Vec<GluingInstance>> {
    let mut out = Vec::new();
    for (ga, b) in side_a {
        for (gb, a) in side_b {
            out.extend(connections(ga, *b, gb, *a)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// A pointed graph `(g, p)` with `N(p)` inducing `h` in order, plus `extra` more vertices.
    fn random_pointed(rng: &mut impl Rng, h: &BitGraph, extra: usize) -> (BitGraph, usize, Vec<usize>) {
        let k = h.n();
        let n = 1 + k + extra;
        let mut g = BitGraph::empty(n);
        for (u, v) in h.edges() {
            g.add_edge(1 + u, 1 + v);
        }
        for j in 0..k {
            g.add_edge(0, 1 + j);
        }
        for v in 1 + k..n {
            for u in 1..v {
                if rng.gen_bool(0.5) {
                    g.add_edge(u, v);
                }
            }
        }
        (g, 0, (1..=k).collect())
    }

    fn random_instance(rng: &mut impl Rng, k: usize, m: usize) -> GluingInstance {
        let mut h = BitGraph::empty(k);
        for v in 1..k {
            for u in 0..v {
                if rng.gen_bool(0.4) {
                    h.add_edge(u, v);
                }
            }
        }
        let (ga, b, ha) = random_pointed(rng, &h, m);
        let (gb, a, hb) = random_pointed(rng, &h, m);
        GluingInstance::new(ga, b, gb, a, ha, hb).unwrap()
    }

    fn brute_force(inst: &GluingInstance, pair: ForbiddenPair) -> Vec<BitGraph> {
        let (na, nb) = inst.sides();
        let base = inst.base_graph();
        let first_a = 2 + inst.k();
        let mut found = BTreeMap::new();
        for mask in 0u64..1 << (na * nb) {
            let mut g = base.clone();
            for c in 0..na * nb {
                if mask >> c & 1 == 1 {
                    g.add_edge(first_a + c / nb, first_a + na + c % nb);
                }
            }
            if pair.admits(&g) {
                let canon = canonical_labelling(&g).graph;
                found.entry(graph6::encode(&canon)).or_insert(canon);
            }
        }
        found.into_values().collect()
    }

    #[test]
    fn one_isolated_pair_forces_its_cell() {
        let h = BitGraph::empty(2);
        let ga = BitGraph::from_edges(4, &[(0, 1), (0, 2)]);
        let gb = ga.clone();
        let inst = GluingInstance::new(ga, 0, gb, 0, vec![1, 2], vec![1, 2]).unwrap();
        assert_eq!(inst.h, h);
        let sets = enumerate_potential_sets(&inst, GlueMode::Original.pair(), GlueOptions::default(), true);
        let fours: Vec<_> = sets.iter().filter(|s| s.verts.len() == 4).collect();
        assert_eq!(fours.len(), 1);
        assert_eq!((fours[0].r, fours[0].s, fours[0].t), (2, 1, 1));
        let prop = Propagator::new(sets, 1);
        let mut st = prop.state(1, 1);
        let stack = prop.initialize(&mut st).unwrap();
        assert_eq!(st.m.get(0, 0), Tri::True);
        assert_eq!(stack, vec![0]);
    }

    #[test]
    fn adjacent_h_forces_nothing() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = BitGraph::complete(3);
        for _ in 0..20 {
            let (ga, b, ha) = random_pointed(&mut rng, &h, 2);
            let (mut gb, a, hb) = random_pointed(&mut rng, &h, 2);
            // Join A to everything in H so no independent 4-set meets H.
            for v in 4..6 {
                for j in 1..4 {
                    gb.add_edge(v, j);
                }
            }
            let mut ga = ga;
            for v in 4..6 {
                for j in 1..4 {
                    ga.add_edge(v, j);
                }
                ga.add_edge(4, 5);
            }
            gb.add_edge(4, 5);
            let inst = GluingInstance::new(ga, b, gb, a, ha, hb).unwrap();
            let sets = enumerate_potential_sets(&inst, GlueMode::Original.pair(), GlueOptions::default(), true);
            assert!(sets.iter().all(|s| s.pattern != PatternSpec::IndependentSet(4)));
        }
    }

    #[test]
    fn single_wrong_cell_rules() {
        // Need one False among two cells: with the first True, the second is forced.
        let set = PotentialSet {
            verts: VertexSet::EMPTY,
            r: 0,
            s: 1,
            t: 2,
            pattern: PatternSpec::Jay(6),
            fixed_wrong: 1,
            cells: vec![0, 1],
            good: false,
            need: 1,
        };
        let prop = Propagator::new(vec![set.clone()], 2);
        let mut st = prop.state(1, 2);
        let mut stack = Vec::new();
        prop.assign(&mut st, 0, Tri::True, &mut stack);
        assert!(prop.process_stack(&mut st, &mut stack));
        assert_eq!(st.m.cells[1], Tri::False);
        // A 6-set with all cells True and one fixed missing edge is a J6.
        let mut st = prop.state(1, 2);
        let mut stack = Vec::new();
        prop.assign(&mut st, 0, Tri::True, &mut stack);
        prop.assign(&mut st, 1, Tri::True, &mut stack);
        assert!(!prop.process_stack(&mut st, &mut stack));
        // Four-set rule: three False and one Unknown becomes True.
        let four = PotentialSet { pattern: PatternSpec::IndependentSet(4), cells: vec![0, 1, 2, 3], good: true, need: 1, fixed_wrong: 0, ..set };
        let prop = Propagator::new(vec![four], 4);
        let mut st = prop.state(2, 2);
        let mut stack = Vec::new();
        for c in 0..3 {
            prop.assign(&mut st, c, Tri::False, &mut stack);
        }
        assert!(prop.process_stack(&mut st, &mut stack));
        assert_eq!(st.m.cells[3], Tri::True);
    }

    #[test]
    fn potential_sets_match_subset_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let k = rng.gen_range(0..=3);
            let m = rng.gen_range(1..=3);
            let inst = random_instance(&mut rng, k, m);
            for (mode, original) in [(GlueMode::Original, true), (GlueMode::Complement, false)] {
                let pair = mode.pair();
                let opts = GlueOptions { include_r3: true, ..Default::default() };
                let mut got: Vec<(u64, PatternSpec)> = enumerate_potential_sets(&inst, pair, opts, original)
                    .iter()
                    .map(|s| (s.verts.0, s.pattern))
                    .collect();
                got.sort();
                let base = inst.base_graph();
                let (na, _) = inst.sides();
                let n = base.n();
                let kk = inst.k();
                let mut want = Vec::new();
                for bits in 0u64..1 << n {
                    let s = VertexSet(bits);
                    if s.contains(0) || s.contains(1) {
                        continue;
                    }
                    let sa = s.iter().filter(|&v| v >= 2 + kk && v < 2 + kk + na).count();
                    let sb = s.iter().filter(|&v| v >= 2 + kk + na).count();
                    if sa == 0 || sb == 0 {
                        continue;
                    }
                    for p in pair.graph_patterns() {
                        if s.len() != p.order() {
                            continue;
                        }
                        let mut wrong = 0;
                        for u in s {
                            for w in s {
                                let cross = (u >= 2 + kk && u < 2 + kk + na && w >= 2 + kk + na)
                                    || (w >= 2 + kk && w < 2 + kk + na && u >= 2 + kk + na);
                                if u < w && !cross && base.has_edge(u, w) == p.on_complement() {
                                    wrong += 1;
                                }
                            }
                        }
                        if wrong <= p.slack() {
                            want.push((bits, p));
                        }
                    }
                }
                want.sort();
                assert_eq!(got, want, "{mode}");
            }
        }
    }

    #[test]
    fn glue_all_matches_exhaustive_completions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut checked = 0;
        while checked < 1000 {
            let k = rng.gen_range(0..=3);
            let m = if rng.gen_bool(0.03) { 4 } else { rng.gen_range(1..=3) };
            let inst = random_instance(&mut rng, k, m);
            let mode = if checked % 2 == 0 { GlueMode::Original } else { GlueMode::Complement };
            let branching = if checked % 4 < 2 { Branching::MostConstrained } else { Branching::LowestIndex };
            let (got, tally) = glue_all(&inst, mode, GlueOptions { branching, ..Default::default() });
            assert_eq!(got, brute_force(&inst, mode.pair()), "{mode} {branching:?} {inst:?}");
            assert!(tally.branches >= 1);
            checked += 1;
        }
    }

    #[test]
    fn budgeted_search_returns_real_gluings() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut truncated = 0;
        for round in 0..200 {
            let k = rng.gen_range(0..=2);
            let inst = random_instance(&mut rng, k, 3);
            let mode = if round % 2 == 0 { GlueMode::Original } else { GlueMode::Complement };
            let (all, _) = glue_raw(&inst, mode, GlueOptions::default());
            let enc = |gs: &[BitGraph]| gs.iter().map(graph6::encode).collect::<std::collections::BTreeSet<_>>();
            let budget = GlueBudget { max_gluings: 3, seed: round };
            let (some, tally) = glue_sample(&inst, mode, GlueOptions::default(), budget);
            assert_eq!(some.len(), all.len().min(3));
            assert!(enc(&some).is_subset(&enc(&all)));
            assert!(all.len() <= 3 || tally.truncated == 1);
            truncated += tally.truncated;
            let roomy = GlueBudget { max_gluings: usize::MAX, seed: round };
            assert_eq!(enc(&glue_sample(&inst, mode, GlueOptions::default(), roomy).0), enc(&all));
        }
        assert!(truncated > 10, "{truncated}");
    }

    #[test]
    fn pointed_graphs_take_one_vertex_per_orbit() {
        assert_eq!(pointed_graphs(&[BitGraph::cycle(5)], 2).len(), 1);
        let p4 = BitGraph::path(4);
        assert_eq!(pointed_graphs(std::slice::from_ref(&p4), 1), vec![(p4.clone(), 0)]);
        assert_eq!(pointed_graphs(std::slice::from_ref(&p4), 2), vec![(p4, 1)]);
        // A star and an isolated vertex: three orbits, one of degree zero.
        let g = BitGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3)]);
        let all: usize = (0..5).map(|k| pointed_graphs(std::slice::from_ref(&g), k).len()).sum();
        assert_eq!(all, 3);
    }

    #[test]
    fn reduced_connections_lose_no_gluings() {
        // Sides from R_G(K3, J5, 6) glued under (K4, J5): plenty of symmetry
        // and plenty of gluings.
        let spec = crate::catalog::ClassSpec::new(PatternSpec::Clique(3), PatternSpec::Jay(5), 6);
        let class = crate::catalog::build_chain(spec, Default::default()).unwrap().pop().unwrap();
        let mode = GlueMode::Custom(ForbiddenPair::new(PatternSpec::Clique(4), PatternSpec::Jay(5)));
        let (mut full_n, mut red_n, mut nonempty) = (0, 0, 0);
        for k in 2..=3 {
            let pointed = pointed_graphs(&class.members, k);
            for (x, (ga, b)) in pointed.iter().enumerate().take(12) {
                for (gb, a) in pointed.iter().skip(x).take(6) {
                    let full = connections(ga, *b, gb, *a).unwrap();
                    let red = connections_reduced(ga, *b, gb, *a).unwrap();
                    full_n += full.len();
                    red_n += red.len();
                    let glue = |insts: &[GluingInstance]| {
                        let mut keys: Vec<Vec<u8>> = insts
                            .iter()
                            .flat_map(|i| glue_all_pointed(i, mode, GlueOptions::default()).0)
                            .map(|g| crate::extender::canonical_with_prefix(&g, 2).0)
                            .collect();
                        keys.sort();
                        keys.dedup();
                        keys
                    };
                    let want = glue(&full);
                    assert_eq!(glue(&red), want);
                    nonempty += usize::from(!want.is_empty());
                }
            }
        }
        assert!(red_n < full_n, "no reduction happened ({red_n} of {full_n})");
        assert!(nonempty > 10);
    }

    #[test]
    fn connections_use_every_automorphism() {
        // H = two isolated vertices has two automorphisms.
        let ga = BitGraph::from_edges(4, &[(0, 1), (0, 2), (1, 3)]);
        let gb = ga.clone();
        let insts = connections(&ga, 0, &gb, 0).unwrap();
        assert_eq!(insts.len(), 2);
        assert_ne!(insts[0].hb, insts[1].hb);
        // Non-isomorphic neighbourhoods give nothing.
        let gc = BitGraph::from_edges(4, &[(0, 1), (0, 2), (1, 2)]);
        assert!(connections(&ga, 0, &gc, 0).unwrap().is_empty());
    }

    #[test]
    fn bad_embeddings_are_rejected() {
        let ga = BitGraph::from_edges(4, &[(0, 1), (0, 2)]);
        assert!(GluingInstance::new(ga.clone(), 0, ga.clone(), 0, vec![1], vec![1]).is_err());
        assert!(GluingInstance::new(ga.clone(), 9, ga, 0, vec![1, 2], vec![1, 2]).is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("original".parse::<GlueMode>().unwrap(), GlueMode::Original);
        let c: GlueMode = "(K3, J4)".parse().unwrap();
        assert_eq!(c.pair(), ForbiddenPair::new(PatternSpec::Clique(3), PatternSpec::Jay(4)));
        assert!("K3".parse::<GlueMode>().is_err());
    }
}
