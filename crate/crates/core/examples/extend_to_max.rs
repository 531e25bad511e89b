//! Grows classes one vertex at a time from a single vertex until nothing
//! survives. The largest order reached is one less than the Ramsey number.
//!
//!     cargo run --release --example extend_to_max

use ramsey_glue::extender::{extend_to_max, ExtendOptions};
use ramsey_glue::graph::PatternSpec::{Clique as K, Jay as J};
use ramsey_glue::graph::{BitGraph, ForbiddenPair};

fn main() -> ramsey_glue::Result<()> {
    let seed = [BitGraph::empty(1)];
    for pair in [ForbiddenPair::new(K(3), K(3)), ForbiddenPair::new(K(3), J(4)), ForbiddenPair::new(K(3), K(4)), ForbiddenPair::new(J(4), K(4))] {
        let out = extend_to_max(&seed, pair, 20, &ExtendOptions::default())?;
        let sizes: Vec<String> = out.level_counts.iter().map(|(n, c)| format!("{n}:{c}")).collect();
        println!("{pair}: max order {}, so R = {}   [{}]", out.max_order, out.max_order + 1, sizes.join(" "));
        if let Some(w) = out.witness {
            println!("  witness {w}");
        }
    }
    Ok(())
}
