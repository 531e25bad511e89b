//! The whole proof pipeline on small targets: degree window, pair lemma,
//! one gluing case per degree, extension of every gluing. Then the desk
//! runs of two cases of R(J6, K4) <= 30.
//!
//!     cargo run --release --example case_split

use std::time::Instant;

use ramsey_glue::graph::PatternSpec::{Clique as K, Jay as J};
use ramsey_glue::pipeline::{run_case, run_case_split, CaseSpec, Engine, Orientation, RunContext, Scale, Target};

fn main() -> ramsey_glue::Result<()> {
    let ctx = RunContext::default();
    for target in [Target::new(K(3), K(4), 9), Target::new(K(3), J(5), 11), Target::new(K(3), J(5), 10)] {
        let bounds = target.bounds(20)?;
        let t = Instant::now();
        let rep = run_case_split(target, bounds, Orientation::Original, Engine::Gluer, Scale::Full, &ctx)?;
        let outcomes: Vec<String> = rep.cases.iter().map(|m| format!("i={}: {}", m.case.i, m.outcome)).collect();
        println!(
            "{target}: degrees {}..={}, lemma {}, [{}] => proven: {}  ({:.2?})",
            bounds.min,
            bounds.max,
            if rep.lemma.holds() { "holds" } else { "fails" },
            outcomes.join(", "),
            rep.proven,
            t.elapsed()
        );
    }
    for i in [13, 14] {
        let t = Instant::now();
        let m = run_case(&CaseSpec::main(i)?, Scale::Desk, &ctx)?;
        println!(
            "{}: {} instances, {} distinct gluings, {}  ({:.2?})",
            m.case,
            m.counts.instances,
            m.counts.gluings_unique,
            m.outcome,
            t.elapsed()
        );
    }
    Ok(())
}
