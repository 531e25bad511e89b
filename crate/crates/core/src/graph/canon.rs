//! Canonical labelling by partition refinement and individualisation.
//!
//! The search tree individualises vertices of the first non-singleton cell
//! and refines to the coarsest equitable partition after every step. Leaves
//! are ranked by the sequence of cell-size traces along their path followed
//! by the relabelled adjacency rows; the smallest leaf defines the canonical
//! labelling. Leaves that tie with an earlier one yield automorphisms, which
//! prune sibling subtrees in the same orbit.

use std::cmp::Ordering;
use std::collections::VecDeque;

use super::bitgraph::{BitGraph, VertexSet};
use super::graph6;

/// Result of canonical labelling.
#[derive(Clone, Debug)]
pub struct Labelling {
    /// `perm[v]` is the canonical label of vertex `v`.
    pub perm: Vec<usize>,
    /// The relabelled graph.
    pub graph: BitGraph,
    /// Generators of (a subgroup of) the automorphism group found on the way.
    pub generators: Vec<Vec<usize>>,
}

/// Canonical labelling of an uncoloured graph.
pub fn canonical_labelling(g: &BitGraph) -> Labelling {
    canonical_labelling_coloured(g, &[g.vertices()])
}

/// Canonical labelling that respects an ordered vertex colouring.
///
/// `colours` must partition the vertex set; colour classes keep their order,
/// so two coloured graphs get equal forms iff some colour-preserving
/// isomorphism exists.
pub fn canonical_labelling_coloured(g: &BitGraph, colours: &[VertexSet]) -> Labelling {
    let n = g.n();
    debug_assert_eq!(
        colours.iter().fold(VertexSet::EMPTY, |acc, &c| acc.union(c)),
        g.vertices(),
        "colouring must cover every vertex"
    );
    if n == 0 {
        return Labelling { perm: Vec::new(), graph: g.clone(), generators: Vec::new() };
    }
    let rows = g.adjacency();
    let mut cells: Vec<u64> = colours.iter().filter(|c| !c.is_empty()).map(|c| c.0).collect();
    let splitters: VecDeque<u64> = cells.iter().copied().collect();
    refine(rows, &mut cells, splitters);

    let mut search = Search {
        rows,
        n,
        first: None,
        best: None,
        generators: Vec::new(),
        path: Vec::new(),
        trace: Vec::new(),
    };
    let _ = search.descend(cells);
    let best = search.best.take().expect("search always reaches a leaf");
    let mut perm = vec![0; n];
    for (i, &v) in best.lab.iter().enumerate() {
        perm[v] = i;
    }
    let graph = g.permuted(&perm);
    Labelling { perm, graph, generators: search.generators }
}

/// Byte string identifying the isomorphism class of `g`.
pub fn canonical_form(g: &BitGraph) -> Vec<u8> {
    graph6::encode(&canonical_labelling(g).graph).into_bytes()
}

/// Isomorphism `perm` with `a.permuted(&perm) == b`, if one exists.
pub fn isomorphism(a: &BitGraph, b: &BitGraph) -> Option<Vec<usize>> {
    if a.n() != b.n() || a.edge_count() != b.edge_count() {
        return None;
    }
    let la = canonical_labelling(a);
    let lb = canonical_labelling(b);
    if la.graph != lb.graph {
        return None;
    }
    let mut inv_b = vec![0; b.n()];
    for (v, &c) in lb.perm.iter().enumerate() {
        inv_b[c] = v;
    }
    Some(la.perm.iter().map(|&c| inv_b[c]).collect())
}

/// Every automorphism of `g` as an explicit permutation, in lexicographic order.
///
/// Intended for small graphs; the output has |Aut(g)| entries.
pub fn automorphisms(g: &BitGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut out = Vec::new();
    let mut image = vec![usize::MAX; n];
    let mut used = VertexSet::EMPTY;
    // Equitable refinement classes bound the candidate images.
    let mut cells = vec![g.vertices().0];
    if n > 0 {
        refine(g.adjacency(), &mut cells, VecDeque::from(vec![g.vertices().0]));
    }
    let mut class_of = vec![0u64; n];
    for &c in &cells {
        for v in VertexSet(c) {
            class_of[v] = c;
        }
    }
    fn rec(
        g: &BitGraph,
        v: usize,
        image: &mut Vec<usize>,
        used: &mut VertexSet,
        class_of: &[u64],
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = g.n();
        if v == n {
            out.push(image.clone());
            return;
        }
        for w in VertexSet(class_of[v] & !used.0) {
            let ok = (0..v).all(|u| g.has_edge(u, v) == g.has_edge(image[u], w));
            if ok {
                image[v] = w;
                used.insert(w);
                rec(g, v + 1, image, used, class_of, out);
                used.remove(w);
            }
        }
        image[v] = usize::MAX;
    }
    rec(g, 0, &mut image, &mut used, &class_of, &mut out);
    out
}

/// Orbits of the group generated by `gens` on `0..n`, as a representative map.
pub fn orbit_representatives(n: usize, gens: &[Vec<usize>]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for gen in gens {
        for (v, &w) in gen.iter().enumerate() {
            let (a, b) = (find(&mut parent, v), find(&mut parent, w));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}

/// The smallest vertex of each orbit, ascending.
pub fn orbit_leaders(n: usize, gens: &[Vec<usize>]) -> Vec<usize> {
    orbit_representatives(n, gens).into_iter().enumerate().filter(|&(v, r)| v == r).map(|(v, _)| v).collect()
}

/// Refines `cells` to the coarsest equitable partition finer than it.
fn refine(rows: &[u64], cells: &mut Vec<u64>, mut queue: VecDeque<u64>) {
    let mut buckets = [0u64; 65];
    while let Some(w) = queue.pop_front() {
        let mut ci = 0;
        while ci < cells.len() {
            let c = cells[ci];
            if c & (c - 1) == 0 {
                ci += 1;
                continue;
            }
            let mut lo = usize::MAX;
            let mut hi = 0;
            for v in VertexSet(c) {
                let k = (rows[v] & w).count_ones() as usize;
                buckets[k] |= 1u64 << v;
                lo = lo.min(k);
                hi = hi.max(k);
            }
            if lo == hi {
                buckets[lo] = 0;
                ci += 1;
                continue;
            }
            let mut frags = Vec::new();
            for b in &mut buckets[lo..=hi] {
                if *b != 0 {
                    frags.push(*b);
                    *b = 0;
                }
            }
            if let Some(pos) = queue.iter().position(|&q| q == c) {
                queue.remove(pos);
            }
            queue.extend(frags.iter().copied());
            let nf = frags.len();
            cells.splice(ci..=ci, frags);
            ci += nf;
        }
    }
}

fn individualise(rows: &[u64], cells: &[u64], ci: usize, v: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(cells.len() + 1);
    out.extend_from_slice(&cells[..ci]);
    let single = 1u64 << v;
    out.push(single);
    out.push(cells[ci] & !single);
    out.extend_from_slice(&cells[ci + 1..]);
    refine(rows, &mut out, VecDeque::from(vec![single]));
    out
}

struct Leaf {
    trace: Vec<Vec<u32>>,
    cert: Vec<u64>,
    lab: Vec<usize>,
    path: Vec<usize>,
}

struct Search<'a> {
    rows: &'a [u64],
    n: usize,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<usize>>,
    path: Vec<usize>,
    trace: Vec<Vec<u32>>,
}

impl Search<'_> {
    /// Explores the subtree at `cells`. `Err(d)` asks ancestors deeper than
    /// `d` to abandon their subtrees.
    fn descend(&mut self, cells: Vec<u64>) -> Result<(), usize> {
        self.trace.push(cells.iter().map(|c| c.count_ones()).collect());
        let result = if self.trace_vs_best() == Ordering::Greater {
            Ok(())
        } else if cells.len() == self.n {
            self.leaf(&cells)
        } else {
            self.branch(&cells)
        };
        self.trace.pop();
        result
    }

    /// Compares the current path's trace with the best leaf's trace prefix.
    fn trace_vs_best(&self) -> Ordering {
        match &self.best {
            None => Ordering::Less,
            Some(best) => self.trace.iter().zip(&best.trace).map(|(a, b)| a.cmp(b)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal),
        }
    }

    fn branch(&mut self, cells: &[u64]) -> Result<(), usize> {
        let depth = self.path.len();
        let ci = cells.iter().position(|c| c & (c - 1) != 0).expect("non-discrete partition");
        let mut tried: Vec<usize> = Vec::new();
        let mut seen_gens = usize::MAX;
        let mut reps: Vec<usize> = Vec::new();
        for w in VertexSet(cells[ci]) {
            if !tried.is_empty() {
                if seen_gens != self.generators.len() {
                    let fixing: Vec<Vec<usize>> = self
                        .generators
                        .iter()
                        .filter(|g| self.path.iter().all(|&p| g[p] == p))
                        .cloned()
                        .collect();
                    reps = orbit_representatives(self.n, &fixing);
                    seen_gens = self.generators.len();
                }
                if tried.iter().any(|&t| reps[t] == reps[w]) {
                    continue;
                }
            }
            tried.push(w);
            let child = individualise(self.rows, cells, ci, w);
            self.path.push(w);
            let r = self.descend(child);
            self.path.pop();
            if let Err(d) = r {
                if d < depth {
                    return Err(d);
                }
            }
        }
        Ok(())
    }

    fn leaf(&mut self, cells: &[u64]) -> Result<(), usize> {
        let lab: Vec<usize> = cells.iter().map(|c| c.trailing_zeros() as usize).collect();
        let mut pos = vec![0usize; self.n];
        for (i, &v) in lab.iter().enumerate() {
            pos[v] = i;
        }
        let cert: Vec<u64> = lab
            .iter()
            .map(|&v| VertexSet(self.rows[v]).iter().fold(0u64, |acc, u| acc | (1u64 << pos[u])))
            .collect();
        let leaf = Leaf { trace: self.trace.clone(), cert, lab, path: self.path.clone() };
        if self.first.is_none() {
            self.first = Some(Leaf {
                trace: leaf.trace.clone(),
                cert: leaf.cert.clone(),
                lab: leaf.lab.clone(),
                path: leaf.path.clone(),
            });
            self.best = Some(leaf);
            return Ok(());
        }
        let first = self.first.as_ref().expect("first leaf set");
        if leaf.trace == first.trace && leaf.cert == first.cert {
            let gen = mapping(&first.lab, &leaf.lab);
            let common = first.path.iter().zip(&leaf.path).take_while(|(a, b)| a == b).count();
            self.generators.push(gen);
            return Err(common);
        }
        let cmp = {
            let best = self.best.as_ref().expect("best leaf set");
            leaf.trace.cmp(&best.trace).then_with(|| leaf.cert.cmp(&best.cert))
        };
        match cmp {
            Ordering::Less => self.best = Some(leaf),
            Ordering::Equal => {
                let best = self.best.as_ref().expect("best leaf set");
                let gen = mapping(&best.lab, &leaf.lab);
                self.generators.push(gen);
            }
            Ordering::Greater => {}
        }
        Ok(())
    }
}

/// Permutation sending `from[i]` to `to[i]`.
fn mapping(from: &[usize], to: &[usize]) -> Vec<usize> {
    let mut g = vec![0; from.len()];
    for (&a, &b) in from.iter().zip(to) {
        g[a] = b;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> BitGraph {
        let mut g = BitGraph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    fn random_perm(rng: &mut impl Rng, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(rng);
        p
    }

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == used.len() {
                out.push(cur.clone());
                return;
            }
            for v in 0..used.len() {
                if !used[v] {
                    used[v] = true;
                    cur.push(v);
                    rec(cur, used, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }

    #[test]
    fn cycle_relabelings_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c7 = BitGraph::cycle(7);
        let f = canonical_form(&c7);
        for _ in 0..2 {
            let p = random_perm(&mut rng, 7);
            assert_eq!(canonical_form(&c7.permuted(&p)), f);
        }
    }

    #[test]
    fn path_and_cycle_differ() {
        assert_ne!(canonical_form(&BitGraph::path(4)), canonical_form(&BitGraph::cycle(4)));
    }

    #[test]
    fn eleven_graphs_on_four_vertices() {
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
        let mut forms = std::collections::BTreeSet::new();
        for mask in 0u32..64 {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            forms.insert(canonical_form(&BitGraph::from_edges(4, &edges)));
        }
        assert_eq!(forms.len(), 11);
    }

    #[test]
    fn exhaustive_relabelling_invariance_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 0..=7 {
            let perms = all_perms(n);
            for _ in 0..3 {
                let g = random_graph(&mut rng, n, 0.5);
                let f = canonical_form(&g);
                for p in &perms {
                    assert_eq!(canonical_form(&g.permuted(p)), f);
                }
            }
        }
    }

    #[test]
    fn random_relabelling_invariance_larger() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(8..=30);
            let p = rng.gen_range(0.1..0.9);
            let g = random_graph(&mut rng, n, p);
            let f = canonical_form(&g);
            let p = random_perm(&mut rng, n);
            assert_eq!(canonical_form(&g.permuted(&p)), f);
        }
    }

    #[test]
    fn symmetric_graphs_are_fast_and_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for g in [
            BitGraph::empty(40),
            BitGraph::complete(40),
            BitGraph::cycle(30),
            BitGraph::complete(10).disjoint_union(&BitGraph::complete(10)).disjoint_union(&BitGraph::complete(10)),
        ] {
            let f = canonical_form(&g);
            let p = random_perm(&mut rng, g.n());
            assert_eq!(canonical_form(&g.permuted(&p)), f);
        }
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&BitGraph::complete(3)).len(), 6);
        assert_eq!(automorphisms(&BitGraph::path(3)).len(), 2);
        let c5 = BitGraph::cycle(5);
        let brute = all_perms(5).into_iter().filter(|p| c5.permuted(p) == c5).count();
        assert_eq!(brute, 10);
        assert_eq!(automorphisms(&c5).len(), 10);
        assert_eq!(automorphisms(&BitGraph::empty(0)).len(), 1);
    }

    #[test]
    fn automorphisms_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=6 {
            let perms = all_perms(n);
            for _ in 0..10 {
                let g = random_graph(&mut rng, n, 0.5);
                let mut expect: Vec<_> = perms.iter().filter(|p| g.permuted(p) == g).cloned().collect();
                expect.sort();
                let got = automorphisms(&g);
                assert_eq!(got, expect);
                let fact: usize = (1..=n).product();
                assert_eq!(fact % got.len(), 0);
            }
        }
    }

    #[test]
    fn generators_are_automorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let n = rng.gen_range(1..=12);
            let g = random_graph(&mut rng, n, 0.3);
            for gen in canonical_labelling(&g).generators {
                assert_eq!(g.permuted(&gen), g);
            }
        }
    }

    #[test]
    fn isomorphism_maps_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(1..=15);
            let a = random_graph(&mut rng, n, 0.4);
            let p = random_perm(&mut rng, n);
            let b = a.permuted(&p);
            let iso = isomorphism(&a, &b).unwrap();
            assert_eq!(a.permuted(&iso), b);
        }
        assert!(isomorphism(&BitGraph::path(4), &BitGraph::cycle(4)).is_none());
    }

    #[test]
    fn colours_are_respected() {
        let p3 = BitGraph::path(3);
        let end = canonical_labelling_coloured(&p3, &[VertexSet::from_iter([0]), VertexSet::from_iter([1, 2])]);
        let mid = canonical_labelling_coloured(&p3, &[VertexSet::from_iter([1]), VertexSet::from_iter([0, 2])]);
        assert_ne!(end.graph, mid.graph);
        let other_end =
            canonical_labelling_coloured(&p3, &[VertexSet::from_iter([2]), VertexSet::from_iter([0, 1])]);
        assert_eq!(end.graph, other_end.graph);
    }
}
