//! Builds the two neighbourhood catalogs and prints their sizes per order,
//! plus a handful of small Ramsey numbers found by the same builder.
//!
//!     cargo run --release --example catalog_counts

use std::time::Instant;

use ramsey_glue::catalog::{build_chain, ramsey_number, BuildMethod, ClassSpec};
use ramsey_glue::graph::PatternSpec::{Clique as K, Jay as J};

fn main() -> ramsey_glue::Result<()> {
    for (p1, p2) in [(K(3), J(5)), (K(4), J(4))] {
        let t = Instant::now();
        let chain = build_chain(ClassSpec::new(p1, p2, 11), BuildMethod::Extender)?;
        let sizes: Vec<String> = chain.iter().map(|c| c.len().to_string()).collect();
        println!("R({p1}, {p2}, n) for n = 0..=11: {}  ({:.2?})", sizes.join(" "), t.elapsed());
    }
    for (p1, p2) in [(K(3), K(3)), (K(3), J(4)), (J(4), K(4)), (J(5), K(3)), (K(4), K(3))] {
        println!("R({p1}, {p2}) = {}", ramsey_number(p1, p2, 20));
    }
    Ok(())
}
