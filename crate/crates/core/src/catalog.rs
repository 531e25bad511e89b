//! Isomorph-free catalogs of `R_G(p1, p2, n)` built one vertex at a time.
//!
//! Deleting any vertex of a class member leaves a member of the class one
//! size down, so extending every `(n-1)`-member in every admissible way and
//! deduplicating by canonical form yields the whole class at `n`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extender;
use crate::graph::{canonical_labelling, graph6, BitGraph, ForbiddenPair, PatternSpec, VertexSet};
use crate::store;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassSpec {
    /// Forbidden in the graph.
    pub p1: PatternSpec,
    /// Forbidden in the complement.
    pub p2: PatternSpec,
    pub n: usize,
}

impl ClassSpec {
    pub const fn new(p1: PatternSpec, p2: PatternSpec, n: usize) -> Self {
        ClassSpec { p1, p2, n }
    }

    pub fn pair(self) -> ForbiddenPair {
        ForbiddenPair::new(self.p1, self.p2)
    }

    pub fn with_n(self, n: usize) -> Self {
        ClassSpec { n, ..self }
    }

    /// File stem used when persisting, e.g. `K3_J5_09`.
    pub fn file_stem(self) -> String {
        format!("{}_{}_{:02}", self.p1, self.p2, self.n)
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R({}, {}, {})", self.p1, self.p2, self.n)
    }
}

/// A complete class, members in canonical labelling sorted by canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphClass {
    pub spec: ClassSpec,
    pub members: Vec<BitGraph>,
}

impl GraphClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The class at `n = 0`: just the empty graph, if the pair allows it.
    pub fn base(spec: ClassSpec) -> GraphClass {
        let spec = spec.with_n(0);
        let g = BitGraph::empty(0);
        let members = if spec.pair().admits(&g) { vec![g] } else { Vec::new() };
        GraphClass { spec, members }
    }

    /// Builds a class from arbitrary members: canonicalises, deduplicates and sorts.
    pub fn from_members(spec: ClassSpec, graphs: impl IntoIterator<Item = BitGraph>) -> GraphClass {
        let mut seen = BTreeMap::new();
        for g in graphs {
            debug_assert_eq!(g.n(), spec.n);
            let canon = canonical_labelling(&g).graph;
            seen.entry(graph6::encode(&canon)).or_insert(canon);
        }
        GraphClass { spec, members: seen.into_values().collect() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuildMethod {
    /// Neighbour sets from interval splitting.
    #[default]
    Extender,
    /// All `2^(n-1)` neighbour sets, each checked directly.
    Exhaustive,
    /// Produced by the `R_G(K4, J5)` enumerator rather than by extension.
    /// Extending such a class further uses the interval method.
    Enumerated,
}

fn exhaustive_extensions(f: &BitGraph, pair: ForbiddenPair) -> Vec<BitGraph> {
    let n = f.n();
    assert!(n < 40, "exhaustive extension over {n} vertices is not sensible");
    (0u64..1 << n)
        .map(|s| f.with_vertex(VertexSet(s)))
        .filter(|g| !pair.violated_through(g, n))
        .collect()
}

/// Extends every member of `prev` by one vertex and deduplicates.
pub fn build_class(spec: ClassSpec, prev: &GraphClass, method: BuildMethod) -> Result<GraphClass> {
    if spec.n == 0 {
        return Ok(GraphClass::base(spec));
    }
    if prev.spec != spec.with_n(spec.n - 1) {
        return Err(Error::Dependency(format!("building {spec} needs {}, got {}", spec.with_n(spec.n - 1), prev.spec)));
    }
    let pair = spec.pair();
    let parts: Vec<Vec<(String, BitGraph)>> = prev
        .members
        .par_iter()
        .map(|f| {
            let raw = match method {
                BuildMethod::Extender | BuildMethod::Enumerated => extender::raw_extensions(f, pair, VertexSet::EMPTY),
                BuildMethod::Exhaustive => exhaustive_extensions(f, pair),
            };
            let mut local = BTreeMap::new();
            for g in raw {
                let canon = canonical_labelling(&g).graph;
                local.entry(graph6::encode(&canon)).or_insert(canon);
            }
            local.into_iter().collect()
        })
        .collect();
    let mut merged = BTreeMap::new();
    for (key, g) in parts.into_iter().flatten() {
        merged.entry(key).or_insert(g);
    }
    Ok(GraphClass { spec, members: merged.into_values().collect() })
}

/// Every class from `n = 0` up to `spec.n`, index = order.
pub fn build_chain(spec: ClassSpec, method: BuildMethod) -> Result<Vec<GraphClass>> {
    let mut out = vec![GraphClass::base(spec)];
    for n in 1..=spec.n {
        let next = build_class(spec.with_n(n), &out[n - 1], method)?;
        out.push(next);
    }
    Ok(out)
}

/// Outcome of a capped Ramsey-number search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RamseyValue {
    Exact(usize),
    /// Every order up to the cap still had graphs.
    AtLeast(usize),
}

impl fmt::Display for RamseyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RamseyValue::Exact(n) => write!(f, "{n}"),
            RamseyValue::AtLeast(n) => write!(f, ">= {n} (unresolved)"),
        }
    }
}

/// Least `n <= cap` with `R_G(p1, p2, n)` empty.
pub fn ramsey_number(p1: PatternSpec, p2: PatternSpec, cap: usize) -> RamseyValue {
    let spec = ClassSpec::new(p1, p2, 0);
    let mut class = GraphClass::base(spec);
    if class.is_empty() {
        return RamseyValue::Exact(0);
    }
    for n in 1..=cap {
        class = build_class(spec.with_n(n), &class, BuildMethod::Extender).expect("chain is consistent");
        if class.is_empty() {
            return RamseyValue::Exact(n);
        }
    }
    RamseyValue::AtLeast(cap + 1)
}

/// Members all of whose degrees lie in `[min_deg, max_deg]`.
pub fn filter_by_degree(class: &GraphClass, min_deg: usize, max_deg: usize) -> GraphClass {
    let members = class
        .members
        .iter()
        .filter(|g| g.degrees().into_iter().all(|d| (min_deg..=max_deg).contains(&d)))
        .cloned()
        .collect();
    GraphClass { spec: class.spec, members }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassManifest {
    pub spec: ClassSpec,
    pub n: usize,
    pub count: usize,
    pub sha256: String,
    pub build_seconds: f64,
    pub method: BuildMethod,
}

/// A directory of persisted classes, one graph6 file and manifest each.
#[derive(Clone, Debug)]
pub struct ClassStore {
    dir: PathBuf,
}

impl ClassStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ClassStore { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn paths(&self, spec: ClassSpec) -> (PathBuf, PathBuf) {
        let stem = spec.file_stem();
        (self.dir.join(format!("{stem}.g6")), self.dir.join(format!("{stem}.json")))
    }

    /// Loads a class if a complete, digest-matching copy is on disk.
    pub fn load(&self, spec: ClassSpec) -> Result<Option<GraphClass>> {
        let (g6, json) = self.paths(spec);
        if !json.exists() {
            return Ok(None);
        }
        let m: ClassManifest = store::read_json(&json)?;
        if m.spec != spec {
            return Err(Error::Manifest { path: json, msg: format!("manifest is for {}", m.spec) });
        }
        let members = store::read_graphs_checked(&g6, &m.sha256)?;
        if members.len() != m.count || members.iter().any(|g| g.n() != spec.n) {
            return Err(Error::Manifest { path: json, msg: "graph file does not match the manifest".into() });
        }
        Ok(Some(GraphClass { spec, members }))
    }

    /// Loads a class, failing with a dependency error when it is missing.
    pub fn require(&self, spec: ClassSpec) -> Result<GraphClass> {
        self.load(spec)?.ok_or_else(|| {
            Error::Dependency(format!("{spec} is not in {}; run `catalog build` first", self.dir.display()))
        })
    }

    pub fn save(&self, class: &GraphClass, build_seconds: f64, method: BuildMethod) -> Result<ClassManifest> {
        std::fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let (g6, json) = self.paths(class.spec);
        let sha256 = store::write_graphs(&g6, &class.members)?;
        let m = ClassManifest {
            spec: class.spec,
            n: class.spec.n,
            count: class.members.len(),
            sha256,
            build_seconds,
            method,
        };
        store::write_json(&json, &m)?;
        Ok(m)
    }

    /// Builds every class up to `spec.n`, reusing whatever is already on disk.
    pub fn build_up_to(&self, spec: ClassSpec, method: BuildMethod) -> Result<GraphClass> {
        let mut start = spec.n;
        let mut have = None;
        while have.is_none() {
            have = self.load(spec.with_n(start))?;
            if have.is_none() {
                if start == 0 {
                    break;
                }
                start -= 1;
            }
        }
        let mut class = match have {
            Some(c) => c,
            None => {
                let c = GraphClass::base(spec);
                self.save(&c, 0.0, method)?;
                c
            }
        };
        for n in class.spec.n + 1..=spec.n {
            let t = Instant::now();
            class = build_class(spec.with_n(n), &class, method)?;
            self.save(&class, t.elapsed().as_secs_f64(), method)?;
        }
        Ok(class)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::canonical_form;
    use std::collections::BTreeSet;

    use PatternSpec::{Clique as K, Jay as J};

    /// Isomorphism classes of all labelled graphs on `n` vertices in the class.
    fn exhaustive_class(spec: ClassSpec) -> BTreeSet<Vec<u8>> {
        let n = spec.n;
        let pairs: Vec<(usize, usize)> = (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
        let mut out = BTreeSet::new();
        for mask in 0u64..1 << pairs.len() {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect();
            let g = BitGraph::from_edges(n, &edges);
            if spec.pair().admits(&g) {
                out.insert(canonical_form(&g));
            }
        }
        out
    }

    fn forms(c: &GraphClass) -> BTreeSet<Vec<u8>> {
        c.members.iter().map(|g| graph6::encode(g).into_bytes()).collect()
    }

    #[test]
    fn c5_is_the_only_five_vertex_r33_graph() {
        let chain = build_chain(ClassSpec::new(K(3), K(3), 5), BuildMethod::Extender).unwrap();
        assert_eq!(chain[5].members.len(), 1);
        assert_eq!(canonical_form(&chain[5].members[0]), canonical_form(&BitGraph::cycle(5)));
    }

    #[test]
    fn matches_exhaustive_filter_up_to_seven() {
        for (p1, p2) in [(K(3), K(3)), (K(3), J(4)), (J(3), J(3)), (J(4), K(3))] {
            let chain = build_chain(ClassSpec::new(p1, p2, 7), BuildMethod::Extender).unwrap();
            for c in &chain {
                assert_eq!(forms(c), exhaustive_class(c.spec), "{}", c.spec);
            }
        }
    }

    #[test]
    fn extender_and_exhaustive_builds_agree() {
        for (p1, p2, n) in [(K(3), J(5), 10), (K(4), J(4), 9), (J(4), K(4), 9)] {
            let a = build_chain(ClassSpec::new(p1, p2, n), BuildMethod::Extender).unwrap();
            let b = build_chain(ClassSpec::new(p1, p2, n), BuildMethod::Exhaustive).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn complement_duality() {
        let a = build_chain(ClassSpec::new(K(3), J(4), 6), BuildMethod::Extender).unwrap();
        let b = build_chain(ClassSpec::new(J(4), K(3), 6), BuildMethod::Extender).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.len(), y.len());
            let comp: BTreeSet<Vec<u8>> = x.members.iter().map(|g| canonical_form(&g.complement())).collect();
            assert_eq!(comp, forms(y));
        }
    }

    #[test]
    fn small_ramsey_numbers() {
        assert_eq!(ramsey_number(K(3), K(3), 10), RamseyValue::Exact(6));
        assert_eq!(ramsey_number(K(3), J(4), 10), RamseyValue::Exact(7));
        assert_eq!(ramsey_number(K(3), K(4), 5), RamseyValue::AtLeast(6));
    }

    #[test]
    fn missing_prerequisite_is_reported() {
        let prev = GraphClass::base(ClassSpec::new(K(3), K(3), 0));
        let err = build_class(ClassSpec::new(K(3), K(3), 3), &prev, BuildMethod::Extender).unwrap_err();
        assert!(matches!(err, Error::Dependency(_)));
    }

    #[test]
    fn degree_filter() {
        let spec = ClassSpec::new(K(3), K(3), 5);
        let c5 = GraphClass::from_members(spec, [BitGraph::cycle(5)]);
        assert_eq!(filter_by_degree(&c5, 2, 2).len(), 1);
        let p4 = GraphClass::from_members(spec.with_n(4), [BitGraph::path(4)]);
        assert_eq!(filter_by_degree(&p4, 2, 2).len(), 0);
        let r = build_chain(ClassSpec::new(K(3), J(5), 10), BuildMethod::Extender).unwrap().pop().unwrap();
        let kept = filter_by_degree(&r, 5, 9);
        let direct = r.members.iter().filter(|g| (0..10).all(|v| (5..=9).contains(&g.degree(v)))).count();
        assert_eq!(kept.len(), direct);
    }

    #[test]
    fn store_round_trip_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let st = ClassStore::new(dir.path());
        let spec = ClassSpec::new(K(3), J(4), 6);
        let c = st.build_up_to(spec, BuildMethod::Extender).unwrap();
        assert_eq!(st.load(spec).unwrap().unwrap(), c);
        // Drop the top class and rebuild it from the one below.
        std::fs::remove_file(st.paths(spec).1).unwrap();
        let again = st.build_up_to(spec, BuildMethod::Extender).unwrap();
        assert_eq!(again, c);
        // A tampered file is caught by its digest.
        std::fs::write(st.paths(spec).0, "Bw\n").unwrap();
        assert!(st.load(spec).is_err());
        assert!(matches!(st.require(spec.with_n(9)), Err(Error::Dependency(_))));
    }
}
