//! Executable combinatorics of the random graph.
//!
//! The crate fixes the BIT model (`m < n` adjacent iff bit `m` of `n` is set)
//! as the concrete random graph and builds on it: named operations as finite
//! samples, canonical behavior classification and its type algebra, desk-scale
//! Ramsey search, relation preservation, and bounded generation search.

pub mod behavior;
pub mod closure;
pub mod galois;
pub mod generic;
pub mod graph;
pub mod operations;
pub mod ramsey;
pub mod vertex;

pub use graph::{bit_adjacent, extend_iso, extend_iso_back, find_copy, find_witness, induced_subgraph, FiniteGraph, GraphError, PartialIso};
pub use vertex::Vertex;
