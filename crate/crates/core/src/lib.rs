//! Core library: bipartite graphs over bitstrings, seeded expander
//! generation and verification, on-line matching (greedy, cascade, and an
//! exhaustive game decider), a pluggable time-bounded toy machine with
//! program-list construction, adversarial lower-bound games, and
//! prime-residue splitting certificates.

pub mod adversary;
pub mod approximator;
pub mod bitgraph;
pub mod bits;
pub mod budget;
pub mod error;
pub mod expanders;
pub mod hashsplit;
pub mod matching;
pub mod rng;

pub use bitgraph::{disjoint_union, BitGraph, GraphFamily};
pub use bits::BitString;
pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
