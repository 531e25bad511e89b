//! One-vertex extension by interval splitting.
//!
//! A new vertex `w` may join `F` with neighbour set `N` exactly when no
//! forbidden pattern passes through `w`. For a pattern of order `k` and
//! slack `d`, each `(k-1)`-set `X` of `F` that is within slack of the
//! pattern gives a bound on `|N ∩ X|`: at most something when the pattern
//! lives in the graph, at least something when it lives in the complement.
//! For the `(K4, J6)` pair these are the induced `K3` (at most 2), the
//! induced `coJ5` (at least 1) and the induced `coK5` (at least 2).
//!
//! Admissible neighbour sets are kept as a list of disjoint intervals that
//! starts as `[∅, F]` and is split once per witness.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::canon::canonical_labelling_coloured;
use crate::graph::pattern::dense_subsets;
use crate::graph::{graph6, BitGraph, ForbiddenPair, PatternSpec, VertexSet};
use crate::interval::{for_each_subset_of_size, Interval};
use crate::store;

/// Constraint a witness places on `|N ∩ X|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    /// `|N ∩ X| <= u`; a negative bound rules out every set.
    AtMost(isize),
    /// `|N ∩ X| >= l`.
    AtLeast(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witness {
    pub set: VertexSet,
    pub bound: Bound,
    /// The forbidden pattern, on the graph, that `w` would complete.
    pub pattern: PatternSpec,
}

impl Witness {
    pub fn admits(&self, nbrs: VertexSet) -> bool {
        let hit = nbrs.intersection(self.set).len();
        match self.bound {
            Bound::AtMost(u) => (hit as isize) <= u,
            Bound::AtLeast(l) => hit >= l,
        }
    }
}

fn rows_for(f: &BitGraph, p: PatternSpec) -> Vec<u64> {
    if p.on_complement() {
        f.complement().adjacency().to_vec()
    } else {
        f.adjacency().to_vec()
    }
}

/// Every witness of `f` for the pair, graph-side pattern first, then the
/// complement side; within a pattern, sets closer to the full pattern come
/// first, ties broken lexicographically.
pub fn witness_sets(f: &BitGraph, pair: ForbiddenPair) -> Vec<Witness> {
    let mut out = Vec::new();
    for p in pair.graph_patterns() {
        let k = p.order();
        let d = p.slack();
        if k == 0 {
            continue;
        }
        let rows = rows_for(f, p);
        let mut found: Vec<(usize, Vec<usize>, VertexSet)> = Vec::new();
        if k - 1 <= f.n() {
            dense_subsets(&rows, f.vertices(), k - 1, d, &mut |s, e| {
                found.push((e, s.to_vec(), s));
                true
            });
        }
        found.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
        for (e, _, set) in found {
            // w must miss at least this many pairs to X in the pattern's graph.
            let need = d - e + 1;
            let bound = if p.on_complement() {
                Bound::AtLeast(need)
            } else {
                Bound::AtMost((k - 1) as isize - need as isize)
            };
            out.push(Witness { set, bound, pattern: p });
        }
    }
    out
}

/// Disjoint intervals of candidate neighbour sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalList {
    pub intervals: Vec<Interval>,
}

impl IntervalList {
    /// The single interval `[∅, top]`.
    pub fn new(top: VertexSet) -> Self {
        IntervalList { intervals: vec![Interval::new(VertexSet::EMPTY, top)] }
    }

    pub fn count(&self) -> u128 {
        self.intervals.iter().map(|i| i.count()).sum()
    }

    pub fn members(&self) -> impl Iterator<Item = VertexSet> + '_ {
        self.intervals.iter().flat_map(|i| i.members())
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

fn split_one(iv: Interval, x: &Witness, out: &mut Vec<Interval>) {
    let (b, t) = (iv.bottom, iv.top);
    let in_b = x.set.intersection(b).len();
    let free: Vec<usize> = x.set.intersection(t).difference(b).to_vec();
    match x.bound {
        Bound::AtMost(u) => {
            let room = u - in_b as isize;
            if room < 0 {
                return;
            }
            let room = room as usize;
            if free.len() <= room {
                out.push(iv);
                return;
            }
            // Split on the first `excess` free vertices left out of N.
            let excess = free.len() - room;
            let free_set = VertexSet::from_iter_vertices(free.iter().copied());
            for_each_subset_of_size(free_set, excess, &mut |q| {
                let last = 63 - q.0.leading_zeros() as usize;
                let before = VertexSet(free_set.0 & ((1u64 << last) - 1));
                out.push(Interval::new(b.union(before.difference(q)), t.difference(q)));
            });
        }
        Bound::AtLeast(l) => {
            if in_b >= l {
                out.push(iv);
                return;
            }
            let need = l - in_b;
            if free.len() < need {
                return;
            }
            // Split on the first `need` free vertices taken into N.
            let free_set = VertexSet::from_iter_vertices(free.iter().copied());
            for_each_subset_of_size(free_set, need, &mut |p| {
                let last = 63 - p.0.leading_zeros() as usize;
                let before = VertexSet(free_set.0 & ((1u64 << last) - 1));
                out.push(Interval::new(b.union(p), t.difference(before.difference(p))));
            });
        }
    }
}

/// Removes every represented set that violates `x`, keeping the rest
/// partitioned into disjoint intervals.
pub fn split_on_witness(s: &IntervalList, x: &Witness) -> IntervalList {
    let mut out = Vec::with_capacity(s.intervals.len());
    for &iv in &s.intervals {
        split_one(iv, x, &mut out);
    }
    IntervalList { intervals: out }
}

/// Admissible neighbour sets for a new vertex, which may not touch `frozen`.
pub fn admissible_intervals(f: &BitGraph, pair: ForbiddenPair, frozen: VertexSet) -> IntervalList {
    let mut s = IntervalList::new(f.vertices().difference(frozen));
    for x in witness_sets(f, pair) {
        s = split_on_witness(&s, &x);
        if s.is_empty() {
            break;
        }
    }
    s
}

/// All one-vertex extensions with the new vertex last, in interval order.
/// Each is re-checked for a forbidden pattern through the new vertex.
pub fn raw_extensions(f: &BitGraph, pair: ForbiddenPair, frozen: VertexSet) -> Vec<BitGraph> {
    let n = f.n();
    admissible_intervals(f, pair, frozen)
        .members()
        .map(|nbrs| f.with_vertex(nbrs))
        .filter(|g| {
            let ok = !pair.violated_through(g, n);
            debug_assert!(ok, "interval splitting admitted a forbidden neighbour set");
            ok
        })
        .collect()
}

/// Canonical copy of `g` with the first `frozen` vertices kept as a
/// distinguished block at the front.
pub fn canonical_with_prefix(g: &BitGraph, frozen: usize) -> (Vec<u8>, BitGraph) {
    let prefix = VertexSet::full(frozen);
    let colours = [prefix, g.vertices().difference(prefix)];
    let lab = canonical_labelling_coloured(g, &colours);
    debug_assert!(lab.perm[..frozen].iter().all(|&p| p < frozen));
    (graph6::encode(&lab.graph).into_bytes(), lab.graph)
}

/// Every way to add one vertex to `f` while staying in the class, up to
/// isomorphism, as canonical graphs sorted by canonical form.
pub fn vertex_extend(f: &BitGraph, pair: ForbiddenPair) -> Vec<BitGraph> {
    extend_frozen(f, pair, 0)
}

/// Like [`vertex_extend`], but the new vertex may not touch the first
/// `frozen` vertices, and those stay a distinguished block under dedup.
pub fn extend_frozen(f: &BitGraph, pair: ForbiddenPair, frozen: usize) -> Vec<BitGraph> {
    let mut seen = BTreeMap::new();
    for g in raw_extensions(f, pair, VertexSet::full(frozen)) {
        let (key, canon) = canonical_with_prefix(&g, frozen);
        seen.entry(key).or_insert(canon);
    }
    seen.into_values().collect()
}

#[derive(Clone, Debug, Default)]
pub struct ExtendOptions {
    /// Vertices `0..frozen` never receive new neighbours.
    pub frozen: usize,
    /// Directory for per-order frontier checkpoints.
    pub checkpoint_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtendOutcome {
    /// Largest order with a surviving graph.
    pub max_order: usize,
    /// True when the cap was reached, so the true maximum is at least `max_order`.
    pub capped: bool,
    /// Surviving class size per order, after dedup.
    pub level_counts: Vec<(usize, usize)>,
    /// One graph of the largest order, in graph6.
    pub witness: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct FrontierManifest {
    pair: ForbiddenPair,
    frozen: usize,
    order: usize,
    count: usize,
    digest: String,
}

fn frontier_paths(dir: &Path, order: usize) -> (PathBuf, PathBuf) {
    (dir.join(format!("order_{order:02}.g6")), dir.join(format!("order_{order:02}.json")))
}

fn load_frontier(dir: &Path, order: usize, pair: ForbiddenPair, frozen: usize) -> Result<Option<Vec<BitGraph>>> {
    let (g6, json) = frontier_paths(dir, order);
    if !json.exists() || !g6.exists() {
        return Ok(None);
    }
    let m: FrontierManifest = store::read_json(&json)?;
    if m.pair != pair || m.frozen != frozen || m.order != order {
        return Err(Error::Manifest { path: json, msg: "checkpoint belongs to a different run".into() });
    }
    let graphs = store::read_graphs_checked(&g6, &m.digest)?;
    if graphs.len() != m.count {
        return Err(Error::Manifest { path: json, msg: format!("expected {} graphs, found {}", m.count, graphs.len()) });
    }
    Ok(Some(graphs))
}

fn save_frontier(dir: &Path, order: usize, pair: ForbiddenPair, frozen: usize, graphs: &[BitGraph]) -> Result<()> {
    let (g6, json) = frontier_paths(dir, order);
    let digest = store::write_graphs(&g6, graphs)?;
    store::write_json(&json, &FrontierManifest { pair, frozen, order, count: graphs.len(), digest })
}

/// Breadth-first extension by order until nothing survives or `cap` is reached.
///
/// Each order's frontier is deduplicated globally before the next step.
/// With a checkpoint directory, finished frontiers are written out and
/// reloaded on the next call instead of being recomputed.
pub fn extend_to_max(seeds: &[BitGraph], pair: ForbiddenPair, cap: usize, opts: &ExtendOptions) -> Result<ExtendOutcome> {
    let frozen = opts.frozen;
    let mut pending: BTreeMap<usize, BTreeMap<Vec<u8>, BitGraph>> = BTreeMap::new();
    for g in seeds {
        if g.n() < frozen {
            return Err(Error::Usage(format!("seed with {} vertices cannot keep {frozen} frozen", g.n())));
        }
        if !pair.admits(g) {
            return Err(Error::Usage(format!("seed {} is not in the class {pair}", graph6::encode(g))));
        }
        let (key, canon) = canonical_with_prefix(g, frozen);
        pending.entry(g.n()).or_default().insert(key, canon);
    }
    let mut outcome = ExtendOutcome { max_order: 0, capped: false, level_counts: Vec::new(), witness: None };
    let Some(&start) = pending.keys().next() else {
        return Ok(outcome);
    };
    if let Some(dir) = &opts.checkpoint_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut order = start;
    let mut frontier: Vec<BitGraph> = Vec::new();
    loop {
        let mut level = pending.remove(&order).unwrap_or_default();
        let loaded = match &opts.checkpoint_dir {
            Some(dir) => load_frontier(dir, order, pair, frozen)?,
            None => None,
        };
        let current: Vec<BitGraph> = if let Some(graphs) = loaded {
            graphs
        } else {
            let children: Vec<Vec<BitGraph>> =
                frontier.par_iter().map(|g| extend_frozen(g, pair, frozen)).collect();
            for g in children.into_iter().flatten() {
                level.entry(graph6::encode(&g).into_bytes()).or_insert(g);
            }
            let graphs: Vec<BitGraph> = level.into_values().collect();
            if let Some(dir) = &opts.checkpoint_dir {
                save_frontier(dir, order, pair, frozen, &graphs)?;
            }
            graphs
        };
        if current.is_empty() && pending.is_empty() {
            break;
        }
        outcome.level_counts.push((order, current.len()));
        if !current.is_empty() {
            outcome.max_order = order;
            outcome.witness = Some(graph6::encode(&current[0]));
        }
        if order >= cap && !current.is_empty() {
            outcome.capped = true;
            break;
        }
        frontier = current;
        order += 1;
    }
    Ok(outcome)
}
