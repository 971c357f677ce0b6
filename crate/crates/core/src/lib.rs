//! Isomorph-free generation of small graphs, digraphs and tournaments, and
//! exhaustive search for pairs that share a reduced or full deck.

pub mod canon;
pub mod class;
pub mod codec;
pub mod deck;
pub mod digraphs;
pub mod error;
pub mod genx;
pub mod graph;
pub mod oracle;
pub mod par;

pub use canon::{brute_canonical, canon_code, canonical, isomorphic, orbits_on_extensions, CanonCode, CanonicalResult};
pub use class::ClassSpec;
pub use error::{Error, Result};
pub use graph::{DegreeSequence, ExtensionPair, LabelledGraph, VertexSet, MAX_N};
