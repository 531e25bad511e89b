//! The degree bounds and the same-degree pair lemma. Every vertex of a
//! graph in R_G(J6, K4, 30) has degree 13..=18, and some two vertices of
//! equal degree are adjacent while another two are not. The same counting
//! argument fails at 29 vertices.
//!
//!     cargo run --release --example degree_lemma

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramsey_glue::graph::BitGraph;
use ramsey_glue::pipeline::{lemma_argument, same_degree_pair_lemma, Target};

fn main() -> ramsey_glue::Result<()> {
    for n in [30, 29] {
        let target = Target { n, ..Target::J6_K4 };
        let bounds = target.bounds(20)?;
        let arg = lemma_argument(target, bounds);
        println!(
            "n={n}: degrees {}..={}, {} vertices of one degree force both pair kinds, {} escaping distributions",
            bounds.min,
            bounds.max,
            arg.class_size,
            arg.escapes.len()
        );
        if let Some(e) = arg.escapes.first() {
            println!("  e.g. counts per degree {e:?}");
        }
    }
    // The direct search on random graphs, which is what a case run uses to
    // pick its two vertices.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut found = 0;
    for _ in 0..2000 {
        let mut g = BitGraph::empty(12);
        for u in 0..12 {
            for v in u + 1..12 {
                if rng.gen_bool(0.5) {
                    g.add_edge(u, v);
                }
            }
        }
        if let Some(w) = same_degree_pair_lemma(&g) {
            found += 1;
            if found == 1 {
                println!("example pair witness on {}: {w:?}", ramsey_glue::graph::graph6::encode(&g));
            }
        }
    }
    println!("random 12-vertex graphs with a same-degree pair witness: {found} of 2000");
    Ok(())
}
