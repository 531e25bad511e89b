//! Bitset graphs, pattern search, canonical labelling and graph6.

mod bitgraph;
pub mod canon;
pub mod graph6;
pub mod pattern;

pub use bitgraph::{BitGraph, VertexIter, VertexSet, MAX_VERTICES};
pub use canon::{automorphisms, canonical_form, canonical_labelling, isomorphism};
pub use pattern::{contains_pattern, enumerate_induced, find_pattern, find_pattern_through, ForbiddenPair, PatternSpec};
