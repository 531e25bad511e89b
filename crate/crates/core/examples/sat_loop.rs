//! Runs the incremental SAT loop on the degree-14 complement instances of
//! R(J6, K4): each formula glues and adds `t` vertices at once. Also writes
//! the t = 0 formula as DIMACS for use with an external solver.
//!
//!     cargo run --release --example sat_loop

use ramsey_glue::catalog::{build_chain, BuildMethod, ClassSpec};
use ramsey_glue::gluer::{glue_raw, GlueMode, GlueOptions};
use ramsey_glue::graph::PatternSpec::{Clique as K, Jay as J};
use ramsey_glue::pipeline::class_instances_with;
use ramsey_glue::sat::backend::InProcess;
use ramsey_glue::sat::{dimacs, encode, solve_loop, ExtensionProblem};

fn main() -> ramsey_glue::Result<()> {
    let side = build_chain(ClassSpec::new(K(3), J(6), 15), BuildMethod::Extender)?.pop().expect("chain");
    let mode = GlueMode::Complement;
    for (j, inst) in class_instances_with(&side.members, None, true)?.iter().enumerate() {
        let base = inst.base_graph().n();
        let report = solve_loop(inst, mode, &InProcess, 4);
        let gluings = glue_raw(inst, mode, GlueOptions::default()).0.len();
        println!("instance {j}: k={} base order {base}, gluer finds {gluings} gluings", inst.k());
        for s in &report.steps {
            println!("  t={} vars={} clauses={} {:?} ({:.2}s)", s.t, s.vars, s.clauses, s.status, s.seconds);
        }
        let best = if report.max_t >= 0 { (base as i64 + report.max_t).to_string() } else { "none".into() };
        println!("  largest graph: {best}");
        if j == 0 {
            let f = encode(&ExtensionProblem { inst: inst.clone(), t: 0 }, mode, false);
            let path = std::env::temp_dir().join("glue_t0.cnf");
            std::fs::write(&path, dimacs::emit(&f.cnf)).map_err(|e| ramsey_glue::Error::io(&path, e))?;
            println!("  t=0 formula written to {}", path.display());
        }
    }
    Ok(())
}
