//! Checks lower-bound witnesses: a graph on n - 1 vertices in the class
//! shows R(p1, p2) > n - 1. Failures name the offending vertices.
//!
//!     cargo run --release --example verify_witness

use ramsey_glue::graph::PatternSpec::{Clique as K, Jay as J};
use ramsey_glue::graph::{graph6, BitGraph};
use ramsey_glue::pipeline::{verify_lower_bound, Target};

fn circulant(n: usize, jumps: &[usize]) -> BitGraph {
    let mut g = BitGraph::empty(n);
    for v in 0..n {
        for &d in jumps {
            g.add_edge(v, (v + d) % n);
        }
    }
    g
}

fn main() {
    let cases = [
        ("C5", circulant(5, &[1]), Target::new(K(3), K(3), 6)),
        ("C8(1,4)", circulant(8, &[1, 4]), Target::new(K(3), K(4), 9)),
        ("C8(1,2)", circulant(8, &[1, 2]), Target::new(K(3), K(4), 9)),
        ("C7(1,2)", circulant(7, &[1, 2]), Target::new(K(3), K(4), 9)),
        ("C10(1,4)", circulant(10, &[1, 4]), Target::new(K(3), J(5), 11)),
    ];
    for (name, g, target) in cases {
        println!("{name} {} for {target}: {:?}", graph6::encode(&g), verify_lower_bound(&g, target));
    }
}
