//! Glues the single R_G(K3, J6, 15) graph to itself in complement mode,
//! which is the degree-14 case of R(J6, K4): 1477 distinct gluings.
//! The stabiliser reduction is compared with the full automorphism sweep.
//!
//!     cargo run --release --example glue_complement_case

use std::collections::BTreeSet;
use std::time::Instant;

use ramsey_glue::catalog::{build_chain, BuildMethod, ClassSpec};
use ramsey_glue::gluer::{glue_all_pointed, GlueMode, GlueOptions, GlueTally};
use ramsey_glue::graph::canonical_form;
use ramsey_glue::graph::PatternSpec::{Clique as K, Jay as J};
use ramsey_glue::pipeline::class_instances_with;

fn main() -> ramsey_glue::Result<()> {
    let side = build_chain(ClassSpec::new(K(3), J(6), 15), BuildMethod::Extender)?.pop().expect("chain");
    println!("R_G(K3, J6, 15) has {} graph(s)", side.len());
    for reduce in [true, false] {
        let t = Instant::now();
        let insts = class_instances_with(&side.members, None, reduce)?;
        let mut tally = GlueTally::default();
        let mut unique = BTreeSet::new();
        for inst in &insts {
            let (found, part) = glue_all_pointed(inst, GlueMode::Complement, GlueOptions::default());
            tally.add(&part);
            unique.extend(found.iter().map(canonical_form));
        }
        println!(
            "{}: {} instances, {} branches, {} raw gluings, {} up to isomorphism  ({:.2?})",
            if reduce { "reduced" } else { "full" },
            insts.len(),
            tally.branches,
            tally.gluings,
            unique.len(),
            t.elapsed()
        );
    }
    Ok(())
}
