//! Toolkit for combinatorial decomposition problems: divisibility checkers,
//! integer-lattice membership, labelled complexes and weight systems, design
//! encodings, an exact-cover solver and the random greedy matching process.

pub mod combinatorics;
pub mod complex;
pub mod divisibility;
pub mod encodings;
pub mod error;
pub mod gamma;
pub mod lattice;
pub mod nibble;
pub mod solver;

pub use error::{Error, Result};
