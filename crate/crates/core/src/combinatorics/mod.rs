//! Hypergraphs, coloured multigraphs, digraphs and partitions, with the
//! degree and index computations the checkers are built on.
//!
//! Vertices are `u32` ids in `0..n`. Edges are stored as sorted vertex lists
//! and arcs as sequences, so equality and hashing are canonical.

pub mod coloured;
pub mod digraph;
pub mod hypergraph;
pub mod partition;
pub mod util;

pub use coloured::ColouredMultigraph;
pub use digraph::Digraph;
pub use hypergraph::Hypergraph;
pub use partition::Partition;
