//! Enumerates R_G(K4, J5, l) by gluing the two side catalogs, for two
//! adjunct sequences, and compares each result with the catalog built by
//! plain one-vertex extension.
//!
//!     cargo run --release --example enumerate_k4j5 -- 10

use std::time::Instant;

use ramsey_glue::catalog::{build_chain, BuildMethod, ClassSpec};
use ramsey_glue::enumerator::{enumerate_r_k4_j5, AdjunctSequence, EnumerateOptions, SideClasses};
use ramsey_glue::graph::PatternSpec::{Clique as K, Jay as J};

fn main() -> ramsey_glue::Result<()> {
    let top: usize = std::env::args().nth(1).map_or(Ok(9), |s| s.parse()).expect("order");
    let sides = SideClasses::build()?;
    let oracle = build_chain(ClassSpec::new(K(4), J(5), top), BuildMethod::Extender)?;
    for seq in [AdjunctSequence::default(), AdjunctSequence::window(1, 16)] {
        println!("adjunct sequence {seq}");
        let opts = EnumerateOptions { seq: seq.clone(), ..Default::default() };
        for l in 2..=top {
            let t = Instant::now();
            let (class, stats) = enumerate_r_k4_j5(l, &sides, &opts)?;
            let same = class.members == oracle[l].members;
            let leaves: usize = stats.per_m.iter().map(|s| s.leaves).sum();
            println!("  l={l:2} graphs={:5} leaves={leaves:7} matches catalog: {same}  ({:.2?})", class.len(), t.elapsed());
        }
    }
    Ok(())
}
