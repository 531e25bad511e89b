//! The case split for `R(J6, K4) <= 30` and its scaled analogues.
//!
//! A member of `R_G(p1, p2, n)` has all degrees in a window fixed by two
//! smaller Ramsey numbers, and some degree `i` in that window is shared by an
//! adjacent pair and by a non-adjacent pair. Each `i` is one case. Original
//! mode glues the neighbourhoods of an adjacent pair; complement mode moves
//! to the complement, where a non-adjacent pair becomes adjacent with degree
//! `n - 1 - i`. A case is closed when no gluing extends to `n` vertices.

pub mod config;
pub mod lemma;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{build_chain, BuildMethod, ClassSpec, ClassStore, GraphClass};
use crate::enumerator::{enumerate_r_k4_j5, EnumerateOptions, SideClasses, MAX_SIDE};
use crate::error::{Error, Result};
use crate::extender::{canonical_with_prefix, extend_to_max, ExtendOptions};
use crate::gluer::{connections, connections_reduced, glue_all_pointed, glue_sample, GlueBudget, GlueMode, GlueOptions, GlueTally, GluingInstance};
use crate::graph::{canonical_form, canonical_labelling, graph6, BitGraph, ForbiddenPair, PatternSpec};
use crate::sat::backend::{InProcess, SatBackend};
use crate::sat::dimacs::SolverAnswer;
use crate::sat::{encode, solve_loop, ExtensionProblem};
use crate::store;

pub use lemma::{
    check_degree_bounds, lemma_argument, same_degree_pair_lemma, verify_lower_bound, DegreeBounds, DegreeViolation,
    LemmaArgument, PairWitness, WitnessCheck,
};

/// The claim `R(p1, p2) <= n`, i.e. `R_G(p1, p2, n)` is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Target {
    pub pair: ForbiddenPair,
    pub n: usize,
}

impl Target {
    pub const J6_K4: Target =
        Target { pair: ForbiddenPair::new(PatternSpec::Jay(6), PatternSpec::Clique(4)), n: 30 };

    pub fn new(p1: PatternSpec, p2: PatternSpec, n: usize) -> Self {
        Target { pair: ForbiddenPair::new(p1, p2), n }
    }

    /// Degree window of the main target, from `R(J5, K4) = 19` and `R(J6, K3) = 17`.
    /// Other targets compute theirs with [`DegreeBounds::computed`].
    pub fn bounds(self, cap: usize) -> Result<DegreeBounds> {
        if self.pair == Target::J6_K4.pair {
            Ok(DegreeBounds::from_ramsey(self, 19, 17))
        } else {
            DegreeBounds::computed(self, cap)
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.pair.p1, self.pair.p2, self.n)
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim_matches(|c| c == '(' || c == ')').split(',').map(str::trim).collect();
        match parts.as_slice() {
            [p1, p2, n] => Ok(Target::new(
                p1.parse()?,
                p2.parse()?,
                n.parse().map_err(|_| Error::Usage(format!("bad order `{n}` in target `{s}`")))?,
            )),
            _ => Err(Error::Usage(format!("target must look like `J6,K4,30`, got `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Glue the neighbourhoods of an adjacent pair of degree `i`.
    Original,
    /// Glue in the complement, around a non-adjacent pair of degree `i`.
    Complement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Propagating gluer, then breadth-first vertex extension.
    Gluer,
    /// Incremental SAT: gluing and extension in one formula per size.
    Sat,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Desk,
    Full,
}

macro_rules! text_enum {
    ($t:ty { $($v:ident => $s:literal),* $(,)? }) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(Self::$v => $s),* })
            }
        }
        impl FromStr for $t {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($s => Ok(Self::$v),)*
                    _ => Err(Error::Usage(format!(concat!("expected one of:", $(" ", $s),*, "; got `{}`"), s))),
                }
            }
        }
    };
}

text_enum!(Orientation { Original => "original", Complement => "complement" });
text_enum!(Engine { Gluer => "gluer", Sat => "sat" });
text_enum!(Scale { Desk => "desk", Full => "full" });

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CaseSpec {
    pub target: Target,
    /// The common degree of the chosen pair.
    pub i: usize,
    pub mode: Orientation,
    pub engine: Engine,
}

impl CaseSpec {
    /// Case `i` of the main target with its standard choices: original mode
    /// for 17 and 18, complement below; SAT for 16, the gluer elsewhere.
    pub fn main(i: usize) -> Result<Self> {
        let b = Target::J6_K4.bounds(0)?;
        if !b.contains(i) {
            return Err(Error::Usage(format!("case i={i} is outside the degree window {}..={}", b.min, b.max)));
        }
        Ok(CaseSpec {
            target: Target::J6_K4,
            i,
            mode: if i >= 17 { Orientation::Original } else { Orientation::Complement },
            engine: if i == 16 { Engine::Sat } else { Engine::Gluer },
        })
    }

    /// The pair the glued graph must avoid.
    pub fn working_pair(&self) -> ForbiddenPair {
        match self.mode {
            Orientation::Original => self.target.pair,
            Orientation::Complement => self.target.pair.swapped(),
        }
    }

    /// Degree of `a` and `b` in the graph being glued.
    pub fn side_degree(&self) -> usize {
        match self.mode {
            Orientation::Original => self.i,
            Orientation::Complement => self.target.n - 1 - self.i,
        }
    }

    /// The class `N(a)` and `N(b)` come from.
    pub fn side_spec(&self) -> ClassSpec {
        let p = self.working_pair().neighbourhood();
        ClassSpec::new(p.p1, p.p2, self.side_degree())
    }

    pub fn glue_mode(&self) -> GlueMode {
        let p = self.working_pair();
        if p == GlueMode::Original.pair() {
            GlueMode::Original
        } else if p == GlueMode::Complement.pair() {
            GlueMode::Complement
        } else {
            GlueMode::Custom(p)
        }
    }
}

impl fmt::Display for CaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R({}) case i={} [{}, {}]", self.target, self.i, self.mode, self.engine)
    }
}

/// What a case run established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// No instance has a valid gluing.
    NoGluings,
    /// The largest graph reached; the case is closed when this is below `n`.
    MaxOrder(usize),
    /// The search stopped at this order, or a solver gave no answer.
    Unresolved(usize),
}

impl Outcome {
    /// True when the outcome rules out a member of order `n`.
    pub fn closes(self, n: usize) -> bool {
        match self {
            Outcome::NoGluings => true,
            Outcome::MaxOrder(m) => m < n,
            Outcome::Unresolved(_) => false,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::NoGluings => f.write_str("no-gluings"),
            Outcome::MaxOrder(n) => write!(f, "max-order({n})"),
            Outcome::Unresolved(c) => write!(f, "unresolved({c})"),
        }
    }
}

/// Reduced parameters for a desk-scale run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    /// Keep each instance with this probability (seeded); `None` keeps all.
    pub instance_fraction: Option<f64>,
    /// Stop after this many pointed-graph pairs.
    pub max_tasks: Option<usize>,
    /// One identification per orbit under the side graphs' stabilisers
    /// instead of every automorphism of `H`.
    #[serde(default)]
    pub reduce_symmetry: bool,
    /// Keep at most this many gluings per instance (seeded random corner
    /// of the search tree); `None` keeps all.
    #[serde(default)]
    pub gluing_budget: Option<usize>,
    /// Largest order the extension or SAT loop may reach.
    pub order_cap: usize,
    /// Instances of the first this-many tasks are also decided by the
    /// other engine.
    pub cross_check_tasks: usize,
    pub note: String,
}

impl Plan {
    pub fn full(case: &CaseSpec) -> Self {
        Plan {
            instance_fraction: None,
            max_tasks: None,
            reduce_symmetry: false,
            gluing_budget: None,
            order_cap: case.target.n,
            cross_check_tasks: 0,
            note: "every instance".into(),
        }
    }

    /// The desk definition of each case. Scaled targets run in full.
    pub fn desk(case: &CaseSpec) -> Self {
        let mut p = Plan::full(case);
        p.cross_check_tasks = 4;
        if case.target != Target::J6_K4 {
            p.note = "scaled target: every instance".into();
            return p;
        }
        match (case.i, case.mode) {
            (13 | 14, Orientation::Complement) => {
                p.reduce_symmetry = true;
                p.note = "every instance up to side-graph symmetry".into();
            }
            (15, Orientation::Complement) => {
                p.reduce_symmetry = true;
                p.instance_fraction = Some(0.1);
                p.gluing_budget = Some(200);
                p.order_cap = 27;
                p.cross_check_tasks = usize::MAX;
                p.note = "seeded 10% sample of symmetry-reduced instances, at most 200 gluings each; asserts no 27-vertex extension".into();
            }
            (16, Orientation::Complement) => {
                p.reduce_symmetry = true;
                p.instance_fraction = Some(0.0002);
                p.order_cap = 27;
                p.cross_check_tasks = usize::MAX;
                p.note = "seeded 0.02% sample of symmetry-reduced instances; SAT loop capped at 27 vertices".into();
            }
            (17 | 18, Orientation::Original) => {
                p.max_tasks = Some(200);
                p.note = "first 200 pointed-graph pairs of the enumerated side class".into();
            }
            _ => p.note = "every instance".into(),
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub spec: ClassSpec,
    pub count: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunCounts {
    pub side_graphs: usize,
    pub pointed_graphs: usize,
    /// Pairs of pointed graphs with isomorphic `H`.
    pub tasks: usize,
    pub instances: usize,
    pub glue: GlueTally,
    /// Gluings up to isomorphism.
    pub gluings_unique: usize,
    /// Gluings up to isomorphism fixing `{a, b}`; these seed the extension.
    pub seeds: usize,
    /// Surviving graphs per order after extension (gluer engine).
    pub level_counts: Vec<(usize, usize)>,
    /// SAT engine: instances with a valid gluing.
    pub sat_instances: usize,
    pub unresolved_instances: usize,
    pub max_order: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub instances: usize,
    pub agree: usize,
    /// graph6 of the base graphs where the engines disagree.
    pub disagreements: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub case: CaseSpec,
    pub scale: Scale,
    pub seed: u64,
    pub plan: Plan,
    pub inputs: Vec<InputDigest>,
    pub engine: Engine,
    pub counts: RunCounts,
    pub cross_check: CrossCheck,
    /// One graph of the largest order reached.
    pub witness: Option<String>,
    pub wall_seconds: f64,
    pub outcome: Outcome,
}

impl RunManifest {
    /// Everything except wall time, for reproducibility checks.
    pub fn fingerprint(&self) -> String {
        let mut m = self.clone();
        m.wall_seconds = 0.0;
        serde_json::to_string(&m).expect("manifest serializes")
    }
}

/// Where inputs come from and how a run is carried out.
#[derive(Clone)]
pub struct RunContext {
    pub store: Option<ClassStore>,
    /// Build missing classes (catalog or enumerator) instead of failing.
    pub build_missing: bool,
    pub enumerate: EnumerateOptions,
    pub backend: Arc<dyn SatBackend>,
    pub seed: u64,
    /// Directory for the chunk log, extension checkpoints and the manifest.
    pub run_dir: Option<PathBuf>,
    /// Tasks per logged chunk; an interrupted run redoes at most one chunk.
    pub chunk: usize,
}

impl Default for RunContext {
    fn default() -> Self {
        RunContext {
            store: None,
            build_missing: true,
            enumerate: EnumerateOptions::default(),
            backend: Arc::new(InProcess),
            seed: 0,
            run_dir: None,
            chunk: 64,
        }
    }
}

fn is_k4_j5_family(spec: ClassSpec) -> bool {
    let p = spec.pair();
    let target = ForbiddenPair::new(PatternSpec::Clique(4), PatternSpec::Jay(5));
    p == target || p == target.swapped()
}

/// Loads or builds a class. `R_G(J5, K4, l)` and `R_G(K4, J5, l)` beyond the
/// catalog's reach come from the enumerator (and complementing).
pub fn side_class(spec: ClassSpec, ctx: &RunContext) -> Result<GraphClass> {
    if let Some(store) = &ctx.store {
        if let Some(c) = store.load(spec)? {
            return Ok(c);
        }
        let flipped = ClassSpec::new(spec.p2, spec.p1, spec.n);
        if let Some(c) = store.load(flipped)? {
            return Ok(GraphClass::from_members(spec, c.members.iter().map(BitGraph::complement)));
        }
    }
    if !ctx.build_missing {
        let where_ = ctx.store.as_ref().map_or("memory".into(), |s| s.dir().display().to_string());
        return Err(Error::Dependency(format!("{spec} is not in {where_}")));
    }
    let start = Instant::now();
    let class = if is_k4_j5_family(spec) && spec.n > MAX_SIDE {
        let sides = match &ctx.store {
            Some(store) => match SideClasses::from_store(store) {
                Ok(s) => s,
                Err(_) => SideClasses::build()?,
            },
            None => SideClasses::build()?,
        };
        let (k4j5, _) = enumerate_r_k4_j5(spec.n, &sides, &ctx.enumerate)?;
        if spec.p1 == PatternSpec::Clique(4) {
            k4j5
        } else {
            GraphClass::from_members(spec, k4j5.members.iter().map(BitGraph::complement))
        }
    } else if let Some(store) = &ctx.store {
        return store.build_up_to(spec, BuildMethod::Extender);
    } else {
        build_chain(spec, BuildMethod::Extender)?.pop().expect("chain ends at n")
    };
    if let Some(store) = &ctx.store {
        let method = if is_k4_j5_family(spec) && spec.n > MAX_SIDE { BuildMethod::Enumerated } else { BuildMethod::Extender };
        store.save(&class, start.elapsed().as_secs_f64(), method)?;
    }
    Ok(class)
}

/// Every pointed version of every member, one per vertex orbit, grouped by
/// the canonical form of the pointed vertex's neighbourhood.
fn pointed_by_h(graphs: &[BitGraph]) -> BTreeMap<Vec<u8>, Vec<(BitGraph, usize)>> {
    let mut groups: BTreeMap<Vec<u8>, Vec<(BitGraph, usize)>> = BTreeMap::new();
    for g in graphs {
        let lab = canonical_labelling(g);
        for v in crate::graph::canon::orbit_leaders(g.n(), &lab.generators) {
            let (h, _) = g.induced(g.neighbors(v));
            groups.entry(canonical_form(&h)).or_default().push((g.clone(), v));
        }
    }
    groups
}

/// Unordered pairs of pointed graphs sharing `H`. Swapping the roles of `a`
/// and `b` gives the same gluings, so each pair is visited once.
fn tasks(groups: &BTreeMap<Vec<u8>, Vec<(BitGraph, usize)>>) -> Vec<(&(BitGraph, usize), &(BitGraph, usize))> {
    let mut out = Vec::new();
    for group in groups.values() {
        for (x, pa) in group.iter().enumerate() {
            for pb in &group[x..] {
                out.push((pa, pb));
            }
        }
    }
    out
}

/// Every gluing instance between two lists of graphs (pointed at every
/// vertex orbit), or within one list when `side_b` is `None`.
pub fn class_instances(side_a: &[BitGraph], side_b: Option<&[BitGraph]>) -> Result<Vec<GluingInstance>> {
    class_instances_with(side_a, side_b, false)
}

fn links(pa: &(BitGraph, usize), pb: &(BitGraph, usize), reduce: bool) -> Result<Vec<GluingInstance>> {
    if reduce {
        connections_reduced(&pa.0, pa.1, &pb.0, pb.1)
    } else {
        connections(&pa.0, pa.1, &pb.0, pb.1)
    }
}

/// [`class_instances`], optionally with one identification per stabiliser orbit.
pub fn class_instances_with(side_a: &[BitGraph], side_b: Option<&[BitGraph]>, reduce: bool) -> Result<Vec<GluingInstance>> {
    let ga = pointed_by_h(side_a);
    let mut out = Vec::new();
    match side_b {
        None => {
            for (pa, pb) in tasks(&ga) {
                out.extend(links(pa, pb, reduce)?);
            }
        }
        Some(side_b) => {
            let gb = pointed_by_h(side_b);
            for (h, xs) in &ga {
                for pa in xs {
                    for pb in gb.get(h).into_iter().flatten() {
                        out.extend(links(pa, pb, reduce)?);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Decides emptiness of one instance both ways: the gluer's raw search and a
/// single SAT call with no extra vertices.
pub fn engines_agree(inst: &GluingInstance, mode: GlueMode, backend: &dyn SatBackend) -> Result<bool> {
    // Emptiness is all that is compared, so one gluing is enough.
    let (found, _) = glue_sample(inst, mode, GlueOptions::default(), GlueBudget { max_gluings: 1, seed: 0 });
    let f = encode(&ExtensionProblem { inst: inst.clone(), t: 0 }, mode, false);
    let sat = match backend.solve(&f.cnf)? {
        SolverAnswer::Sat(_) => true,
        SolverAnswer::Unsat => false,
        SolverAnswer::Unknown(why) => return Err(Error::Solver(why)),
    };
    Ok(found.is_empty() != sat)
}

/// One chunk of finished tasks, as appended to the run log.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct ChunkRecord {
    start: usize,
    end: usize,
    instances: usize,
    glue: GlueTally,
    /// Pointed canonical gluings (gluer engine).
    seeds: Vec<String>,
    sat_instances: usize,
    unresolved: usize,
    max_order: Option<usize>,
    witness: Option<String>,
    cross: CrossCheck,
}

impl ChunkRecord {
    fn merge(&mut self, o: ChunkRecord) {
        self.instances += o.instances;
        self.glue.add(&o.glue);
        self.seeds.extend(o.seeds);
        self.sat_instances += o.sat_instances;
        self.unresolved += o.unresolved;
        if o.max_order > self.max_order {
            self.max_order = o.max_order;
            self.witness = o.witness;
        }
        self.cross.instances += o.cross.instances;
        self.cross.agree += o.cross.agree;
        self.cross.disagreements.extend(o.cross.disagreements);
    }
}

/// Header of a run directory, checked on resume.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RunHeader {
    case: CaseSpec,
    scale: Scale,
    seed: u64,
    plan: Plan,
    inputs: Vec<InputDigest>,
}

fn run_task(
    task: usize,
    pa: &(BitGraph, usize),
    pb: &(BitGraph, usize),
    case: &CaseSpec,
    plan: &Plan,
    ctx: &RunContext,
) -> Result<ChunkRecord> {
    let mode = case.glue_mode();
    let mut rec = ChunkRecord { start: task, end: task + 1, ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    rng.set_stream(task as u64);
    for inst in links(pa, pb, plan.reduce_symmetry)? {
        if plan.instance_fraction.is_some_and(|p| !rng.gen_bool(p)) {
            continue;
        }
        rec.instances += 1;
        if task < plan.cross_check_tasks {
            rec.cross.instances += 1;
            if engines_agree(&inst, mode, ctx.backend.as_ref())? {
                rec.cross.agree += 1;
            } else {
                rec.cross.disagreements.push(graph6::encode(&inst.base_graph()));
            }
        }
        match case.engine {
            Engine::Gluer => {
                let (found, tally) = match plan.gluing_budget {
                    Some(max_gluings) => {
                        let budget = GlueBudget { max_gluings, seed: rng.gen() };
                        let (raw, tally) = glue_sample(&inst, mode, GlueOptions::default(), budget);
                        (raw.iter().map(|g| canonical_with_prefix(g, 2).1).collect(), tally)
                    }
                    None => glue_all_pointed(&inst, mode, GlueOptions::default()),
                };
                rec.glue.add(&tally);
                rec.seeds.extend(found.iter().map(graph6::encode));
            }
            Engine::Sat => {
                let base = inst.base_graph().n();
                let cap = plan.order_cap.saturating_sub(base);
                let report = solve_loop(&inst, mode, ctx.backend.as_ref(), cap);
                rec.glue.instances += 1;
                if report.unresolved || (report.capped && plan.order_cap < case.target.n) {
                    rec.unresolved += 1;
                }
                if report.max_t >= 0 {
                    rec.sat_instances += 1;
                    let order = base + report.max_t as usize;
                    if Some(order) > rec.max_order {
                        rec.max_order = Some(order);
                        rec.witness = report.steps.iter().rev().find_map(|s| s.graph6.clone());
                    }
                }
            }
        }
    }
    rec.seeds.sort();
    rec.seeds.dedup();
    Ok(rec)
}

fn read_log(path: &Path) -> Result<Vec<ChunkRecord>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for line in std::io::BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        // A torn last line from an interrupted run is dropped and redone.
        match serde_json::from_str::<ChunkRecord>(&line) {
            Ok(r) => out.push(r),
            Err(_) => break,
        }
    }
    Ok(out)
}

/// Runs one case. With a run directory, finished chunks are appended to
/// `chunks.jsonl` and skipped when the same run is started again.
pub fn run_case(case: &CaseSpec, scale: Scale, ctx: &RunContext) -> Result<RunManifest> {
    let start = Instant::now();
    if case.i >= case.target.n {
        return Err(Error::Usage(format!("degree {} impossible on {} vertices", case.i, case.target.n)));
    }
    let plan = match scale {
        Scale::Desk => Plan::desk(case),
        Scale::Full => Plan::full(case),
    };
    let side = side_class(case.side_spec(), ctx)?;
    let inputs = vec![InputDigest { spec: side.spec, count: side.len(), sha256: store::graphs_digest(&side.members) }];
    let header = RunHeader { case: *case, scale, seed: ctx.seed, plan: plan.clone(), inputs: inputs.clone() };

    let mut log_path = None;
    if let Some(dir) = &ctx.run_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let hpath = dir.join("run.json");
        if hpath.exists() {
            let old: RunHeader = store::read_json(&hpath)?;
            if old != header {
                return Err(Error::Manifest { path: hpath, msg: "run directory belongs to a different run".into() });
            }
        } else {
            store::write_json(&hpath, &header)?;
        }
        let mpath = dir.join("manifest.json");
        if mpath.exists() {
            return store::read_json(&mpath);
        }
        log_path = Some(dir.join("chunks.jsonl"));
    }

    let groups = pointed_by_h(&side.members);
    let mut all_tasks = tasks(&groups);
    let task_total = all_tasks.len();
    if let Some(m) = plan.max_tasks {
        all_tasks.truncate(m);
    }
    let mut total = ChunkRecord::default();
    let mut done = 0;
    if let Some(p) = &log_path {
        for r in read_log(p)? {
            if r.start != done {
                return Err(Error::Manifest { path: p.clone(), msg: format!("chunk starts at {}, expected {done}", r.start) });
            }
            done = r.end;
            total.merge(r);
        }
    }
    let mut log = match &log_path {
        Some(p) => {
            // Rewrite the log without any torn tail before appending to it.
            let mut keep = String::new();
            for r in read_log(p)? {
                keep.push_str(&serde_json::to_string(&r).expect("record serializes"));
                keep.push('\n');
            }
            std::fs::write(p, keep).map_err(|e| Error::io(p, e))?;
            Some(std::fs::OpenOptions::new().append(true).open(p).map_err(|e| Error::io(p, e))?)
        }
        None => None,
    };
    while done < all_tasks.len() {
        let end = (done + ctx.chunk.max(1)).min(all_tasks.len());
        let parts: Vec<ChunkRecord> = (done..end)
            .into_par_iter()
            .map(|t| run_task(t, all_tasks[t].0, all_tasks[t].1, case, &plan, ctx))
            .collect::<Result<_>>()?;
        let mut chunk = ChunkRecord { start: done, end, ..Default::default() };
        for p in parts {
            chunk.merge(p);
        }
        chunk.seeds.sort();
        chunk.seeds.dedup();
        chunk.start = done;
        chunk.end = end;
        if let (Some(f), Some(p)) = (log.as_mut(), &log_path) {
            let line = serde_json::to_string(&chunk).expect("record serializes");
            writeln!(f, "{line}").and_then(|_| f.flush()).map_err(|e| Error::io(p, e))?;
        }
        done = end;
        total.merge(chunk);
    }

    let mut counts = RunCounts {
        side_graphs: side.len(),
        pointed_graphs: groups.values().map(Vec::len).sum(),
        tasks: task_total,
        instances: total.instances,
        glue: total.glue.clone(),
        sat_instances: total.sat_instances,
        unresolved_instances: total.unresolved,
        ..Default::default()
    };
    let mut witness = total.witness.clone();
    let outcome = match case.engine {
        Engine::Gluer => {
            let mut seeds: BTreeMap<Vec<u8>, BitGraph> = BTreeMap::new();
            for s in &total.seeds {
                let g = graph6::decode(s)?;
                let (key, canon) = canonical_with_prefix(&g, 2);
                seeds.entry(key).or_insert(canon);
            }
            let mut plain: Vec<Vec<u8>> = seeds.values().map(canonical_form).collect();
            plain.sort();
            plain.dedup();
            counts.seeds = seeds.len();
            counts.gluings_unique = plain.len();
            if seeds.is_empty() {
                Outcome::NoGluings
            } else {
                let seeds: Vec<BitGraph> = seeds.into_values().collect();
                let opts = ExtendOptions { frozen: 2, checkpoint_dir: ctx.run_dir.as_ref().map(|d| d.join("extend")) };
                let ext = extend_to_max(&seeds, case.working_pair(), plan.order_cap, &opts)?;
                counts.level_counts = ext.level_counts.clone();
                counts.max_order = Some(ext.max_order);
                witness = ext.witness.clone();
                if ext.capped && plan.order_cap < case.target.n {
                    Outcome::Unresolved(plan.order_cap)
                } else {
                    Outcome::MaxOrder(ext.max_order)
                }
            }
        }
        Engine::Sat => {
            counts.max_order = total.max_order;
            if total.unresolved > 0 {
                Outcome::Unresolved(plan.order_cap)
            } else {
                match total.max_order {
                    None => Outcome::NoGluings,
                    Some(m) => Outcome::MaxOrder(m),
                }
            }
        }
    };
    let manifest = RunManifest {
        case: *case,
        scale,
        seed: ctx.seed,
        plan,
        inputs,
        engine: case.engine,
        counts,
        cross_check: total.cross,
        witness,
        wall_seconds: start.elapsed().as_secs_f64(),
        outcome,
    };
    if let Some(dir) = &ctx.run_dir {
        store::write_json(&dir.join("manifest.json"), &manifest)?;
    }
    Ok(manifest)
}

/// The whole argument for one target: degree window, pair lemma, and one
/// case per degree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseSplitReport {
    pub target: Target,
    pub bounds: DegreeBounds,
    pub lemma: LemmaArgument,
    pub cases: Vec<RunManifest>,
    /// True when every case is closed, so `R(p1, p2) <= n`.
    pub proven: bool,
}

/// Runs every case of `target` in the given orientation and engine.
pub fn run_case_split(
    target: Target,
    bounds: DegreeBounds,
    mode: Orientation,
    engine: Engine,
    scale: Scale,
    ctx: &RunContext,
) -> Result<CaseSplitReport> {
    let lemma = lemma_argument(target, bounds);
    let mut cases = Vec::new();
    if !bounds.is_empty() {
        for i in bounds.min..=bounds.max {
            let case = CaseSpec { target, i, mode, engine };
            let mut sub = ctx.clone();
            sub.run_dir = ctx.run_dir.as_ref().map(|d| d.join(format!("case_{i:02}")));
            cases.push(run_case(&case, scale, &sub)?);
        }
    }
    let proven = lemma.holds() && cases.iter().all(|m| m.outcome.closes(target.n));
    Ok(CaseSplitReport { target, bounds, lemma, cases, proven })
}
