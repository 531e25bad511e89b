pub mod catalog;
pub mod enumerator;
pub mod error;
pub mod extender;
pub mod gluer;
pub mod graph;
pub mod interval;
pub mod pipeline;
pub mod sat;
pub mod store;

pub use error::{Error, Result};
