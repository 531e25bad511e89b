//! Command-line front end. Exit status: 0 when a verdict is reached,
//! 2 when the run is unresolved, 1 on any error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ramsey_glue::catalog::{ramsey_number, BuildMethod, ClassSpec, ClassStore, GraphClass, RamseyValue};
use ramsey_glue::enumerator::{enumerate_r_k4_j5, SideClasses};
use ramsey_glue::extender::{extend_to_max, ExtendOptions};
use ramsey_glue::gluer::{glue_instances, GlueMode, GlueOptions};
use ramsey_glue::graph::{graph6, BitGraph, ForbiddenPair};
use ramsey_glue::pipeline::config::Config;
use ramsey_glue::pipeline::{
    class_instances, run_case, run_case_split, verify_lower_bound, CaseSpec, Engine, Orientation, Target,
    WitnessCheck,
};
use ramsey_glue::sat::backend::{InProcess, SatBackend};
use ramsey_glue::sat::dimacs::{format_solver_output, parse, SolverAnswer};
use ramsey_glue::sat::solve_loop;
use ramsey_glue::{Error, Result};

#[derive(Parser)]
#[command(name = "ramsey", version, about = "Ramsey-graph catalogs, gluing, extension and case runs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Each flag overrides the config file and the matching `RAMSEY_*` variable.
#[derive(Args)]
struct Global {
    /// Config file (TOML or key=value lines); default from RAMSEY_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    class_dir: Option<String>,
    /// External DIMACS solver binary ("none" for the linked-in solver).
    #[arg(long, global = true)]
    solver: Option<String>,
    #[arg(long, global = true)]
    solver_timeout: Option<String>,
    #[arg(long, global = true)]
    workers: Option<String>,
    /// desk or full.
    #[arg(long, global = true)]
    scale: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// `1,1,2,...` or `window:D`.
    #[arg(long, global = true)]
    adjunct_sequence: Option<String>,
    /// auto, fix_g1 or fix_g2.
    #[arg(long, global = true)]
    direction: Option<String>,
    #[arg(long, global = true)]
    run_dir: Option<String>,
    /// gluer or sat; overrides the per-case default.
    #[arg(long, global = true)]
    engine: Option<String>,
    /// `p1,p2,n`, e.g. `J6,K4,30`.
    #[arg(long, global = true)]
    target: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Class catalogs.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// R_G(K4, J5, l) by gluing the two side catalogs; stored with its complement class.
    Enumerate {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        only_m: Option<usize>,
    },
    /// All gluings between the graphs of one or two files.
    Glue {
        /// original, complement, or a pair such as `K3,K4`.
        #[arg(long)]
        mode: GlueMode,
        #[arg(long)]
        side: PathBuf,
        #[arg(long)]
        side_b: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated one-vertex extension until nothing survives.
    Extend {
        /// The class, e.g. `J6,K4`.
        #[arg(long)]
        pair: String,
        #[arg(long)]
        input: PathBuf,
        /// Leading vertices that get no new neighbours.
        #[arg(long, default_value_t = 0)]
        frozen: usize,
        #[arg(long, default_value_t = 64)]
        cap: usize,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// SAT formulas.
    #[command(subcommand)]
    Sat(SatCmd),
    /// Case runs.
    #[command(subcommand)]
    Case(CaseCmd),
    /// Checks lower-bound witnesses (graph6, one per line) against the target.
    Verify { file: PathBuf },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Builds R_G(p1, p2, n) for every n up to --max-n into the class directory.
    Build {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        max_n: usize,
        #[arg(long, default_value = "extender")]
        method: String,
    },
    /// Least n with R_G(p1, p2, n) empty.
    Ramsey {
        #[arg(long)]
        pair: String,
        #[arg(long, default_value_t = 20)]
        cap: usize,
    },
}

#[derive(Subcommand)]
enum SatCmd {
    /// Incremental SAT loop over every gluing instance of the side file(s).
    Run {
        #[arg(long)]
        mode: GlueMode,
        #[arg(long)]
        side: PathBuf,
        #[arg(long)]
        side_b: Option<PathBuf>,
        /// Most added vertices tried.
        #[arg(long, default_value_t = 8)]
        cap: usize,
        #[arg(long)]
        max_instances: Option<usize>,
    },
    /// Solves a DIMACS file with the linked-in solver, printing `s`/`v` lines.
    Solve { file: PathBuf },
}

#[derive(Subcommand)]
enum CaseCmd {
    /// One case (--i) or the whole case split (--all) of the target.
    Run {
        #[arg(long, conflicts_with = "all")]
        i: Option<usize>,
        #[arg(long)]
        all: bool,
        /// original or complement; the main target defaults per case.
        #[arg(long)]
        mode: Option<Orientation>,
    },
}

enum Status {
    Verdict,
    Unresolved,
}

fn parse_pair(s: &str) -> Result<ForbiddenPair> {
    let parts: Vec<&str> = s.trim_matches(|c| c == '(' || c == ')').split(',').map(str::trim).collect();
    match parts.as_slice() {
        [p1, p2] => Ok(ForbiddenPair::new(p1.parse()?, p2.parse()?)),
        _ => Err(Error::Usage(format!("pair must look like `K3,J5`, got `{s}`"))),
    }
}

fn config(g: &Global) -> Result<Config> {
    let mut c = Config::load(g.config.as_deref())?;
    let flags = [
        ("class_dir", &g.class_dir),
        ("solver", &g.solver),
        ("solver_timeout", &g.solver_timeout),
        ("workers", &g.workers),
        ("scale", &g.scale),
        ("seed", &g.seed),
        ("adjunct_sequence", &g.adjunct_sequence),
        ("direction", &g.direction),
        ("run_dir", &g.run_dir),
        ("engine", &g.engine),
        ("target", &g.target),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            c.set(k, v)?;
        }
    }
    Ok(c)
}

fn read_graphs(path: &Path) -> Result<Vec<BitGraph>> {
    graph6::read_file(path)
}

fn catalog(cfg: &Config, cmd: CatalogCmd) -> Result<Status> {
    match cmd {
        CatalogCmd::Build { pair, max_n, method } => {
            let p = parse_pair(&pair)?;
            let method = match method.as_str() {
                "extender" => BuildMethod::Extender,
                "exhaustive" => BuildMethod::Exhaustive,
                m => return Err(Error::Usage(format!("unknown method `{m}` (extender, exhaustive)"))),
            };
            let store = ClassStore::new(&cfg.class_dir);
            let spec = ClassSpec::new(p.p1, p.p2, max_n);
            store.build_up_to(spec, method)?;
            for n in 0..=max_n {
                let c = store.require(spec.with_n(n))?;
                println!("{}\t{}", c.spec, c.len());
            }
        }
        CatalogCmd::Ramsey { pair, cap } => {
            let p = parse_pair(&pair)?;
            let v = ramsey_number(p.p1, p.p2, cap);
            println!("R{p} = {v}");
            if let RamseyValue::AtLeast(_) = v {
                return Ok(Status::Unresolved);
            }
        }
    }
    Ok(Status::Verdict)
}

fn enumerate(cfg: &Config, order: usize, only_m: Option<usize>) -> Result<Status> {
    let store = ClassStore::new(&cfg.class_dir);
    let sides = match SideClasses::from_store(&store) {
        Ok(s) => s,
        Err(_) => {
            for spec in [SideClasses::k3j5_spec(10), SideClasses::k4j4_spec(10)] {
                store.build_up_to(spec, BuildMethod::Extender)?;
            }
            SideClasses::from_store(&store)?
        }
    };
    let mut opts = cfg.enumerate_options();
    opts.only_m = only_m;
    let start = std::time::Instant::now();
    let (class, stats) = enumerate_r_k4_j5(order, &sides, &opts)?;
    let secs = start.elapsed().as_secs_f64();
    for s in &stats.per_m {
        eprintln!("m={} direction={:?} fixed={} leaves={} glued={}", s.m, s.direction, s.fixed_graphs, s.leaves, s.glued);
    }
    if only_m.is_none() {
        store.save(&class, secs, BuildMethod::Enumerated)?;
        let spec = class.spec;
        let flipped = GraphClass::from_members(ClassSpec::new(spec.p2, spec.p1, spec.n), class.members.iter().map(BitGraph::complement));
        store.save(&flipped, secs, BuildMethod::Enumerated)?;
    }
    println!("{}\t{}", class.spec, class.len());
    Ok(Status::Verdict)
}

fn write_out(out: Option<&Path>, graphs: &[BitGraph]) -> Result<()> {
    match out {
        Some(p) => graph6::write_file(p, graphs),
        None => {
            for g in graphs {
                println!("{}", graph6::encode(g));
            }
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<Status> {
    let cfg = config(&cli.global)?;
    if let Some(w) = cfg.workers {
        // Ignored if a pool already exists, which only happens in tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    match cli.command {
        Command::Catalog(cmd) => catalog(&cfg, cmd),
        Command::Enumerate { order, only_m } => enumerate(&cfg, order, only_m),
        Command::Glue { mode, side, side_b, out } => {
            let a = read_graphs(&side)?;
            let b = side_b.as_deref().map(read_graphs).transpose()?;
            let insts = class_instances(&a, b.as_deref())?;
            let (found, tally) = glue_instances(&insts, mode, GlueOptions::default());
            eprintln!(
                "instances={} branches={} gluings={} contradictions={} rejected={} unique={}",
                tally.instances,
                tally.branches,
                tally.gluings,
                tally.contradictions,
                tally.rejected,
                found.len()
            );
            write_out(out.as_deref(), &found)?;
            Ok(Status::Verdict)
        }
        Command::Extend { pair, input, frozen, cap, checkpoint } => {
            let p = parse_pair(&pair)?;
            let seeds = read_graphs(&input)?;
            let o = extend_to_max(&seeds, p, cap, &ExtendOptions { frozen, checkpoint_dir: checkpoint })?;
            for (n, c) in &o.level_counts {
                println!("{n}\t{c}");
            }
            println!("max order {}{}", o.max_order, if o.capped { " (cap reached)" } else { "" });
            Ok(if o.capped { Status::Unresolved } else { Status::Verdict })
        }
        Command::Sat(SatCmd::Solve { file }) => {
            let text = std::fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
            let answer = InProcess.solve(&parse(&text)?)?;
            print!("{}", format_solver_output(&answer));
            Ok(if matches!(answer, SolverAnswer::Unknown(_)) { Status::Unresolved } else { Status::Verdict })
        }
        Command::Sat(SatCmd::Run { mode, side, side_b, cap, max_instances }) => {
            let a = read_graphs(&side)?;
            let b = side_b.as_deref().map(read_graphs).transpose()?;
            let mut insts = class_instances(&a, b.as_deref())?;
            if let Some(m) = max_instances {
                insts.truncate(m);
            }
            let backend = cfg.backend();
            let mut unresolved = false;
            let mut best = -1i64;
            for (j, inst) in insts.iter().enumerate() {
                let r = solve_loop(inst, mode, backend.as_ref(), cap);
                let base = inst.base_graph().n() as i64;
                let order = if r.max_t >= 0 { base + r.max_t } else { -1 };
                println!("instance {j}: max_t={} order={order}{}", r.max_t, if r.capped { " (cap)" } else { "" });
                unresolved |= r.unresolved || r.capped;
                best = best.max(order);
            }
            println!("instances={} max order={best}", insts.len());
            Ok(if unresolved { Status::Unresolved } else { Status::Verdict })
        }
        Command::Case(CaseCmd::Run { i, all, mode }) => {
            let ctx = cfg.context();
            let target = cfg.target;
            if all {
                let bounds = target.bounds(24)?;
                let mode = mode.unwrap_or(Orientation::Original);
                let engine = cfg.engine.unwrap_or(Engine::Gluer);
                let rep = run_case_split(target, bounds, mode, engine, cfg.scale, &ctx)?;
                println!("{}", serde_json::to_string_pretty(&rep).expect("report serializes"));
                let verdict = if rep.proven { format!("R({},{}) <= {}", target.pair.p1, target.pair.p2, target.n) } else { "not proven".into() };
                eprintln!("{verdict}");
                let unresolved = rep.cases.iter().any(|c| matches!(c.outcome, ramsey_glue::pipeline::Outcome::Unresolved(_)));
                return Ok(if unresolved || !rep.lemma.holds() { Status::Unresolved } else { Status::Verdict });
            }
            let i = i.ok_or_else(|| Error::Usage("give --i <degree> or --all".into()))?;
            let mut case = if target == Target::J6_K4 {
                CaseSpec::main(i)?
            } else {
                CaseSpec { target, i, mode: Orientation::Original, engine: Engine::Gluer }
            };
            if let Some(m) = mode {
                case.mode = m;
            }
            if let Some(e) = cfg.engine {
                case.engine = e;
            }
            let m = run_case(&case, cfg.scale, &ctx)?;
            println!("{}", serde_json::to_string_pretty(&m).expect("manifest serializes"));
            eprintln!("{case}: {} ({})", m.outcome, if m.outcome.closes(target.n) { "closed" } else { "open" });
            let sampled = m.plan.instance_fraction.is_some() || m.plan.gluing_budget.is_some() || m.plan.max_tasks.is_some();
            Ok(if matches!(m.outcome, ramsey_glue::pipeline::Outcome::Unresolved(_)) || sampled {
                Status::Unresolved
            } else {
                Status::Verdict
            })
        }
        Command::Verify { file } => {
            let graphs = read_graphs(&file)?;
            let mut bad = 0;
            for (j, g) in graphs.iter().enumerate() {
                let r = verify_lower_bound(g, cfg.target);
                println!("{j}: {}", serde_json::to_string(&r).expect("serializes"));
                if r != WitnessCheck::Ok {
                    bad += 1;
                }
            }
            if bad > 0 || graphs.is_empty() {
                return Err(Error::Usage(format!("{bad} of {} graphs rejected as witnesses", graphs.len())));
            }
            Ok(Status::Verdict)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Verdict) => ExitCode::SUCCESS,
        Ok(Status::Unresolved) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
