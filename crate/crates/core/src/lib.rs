//! Induced subgraphs with many distinct degrees.
//!
//! This crate holds the algorithmic core: a bit-row graph type and
//! generators, exact brute-force oracles for `f(G)` (the largest number of
//! distinct degrees in an induced subgraph) and `hom(G)` (the largest
//! homogeneous set), Turán-style greedy independent sets, Littlewood–Offord
//! style atom probabilities, the randomized probability-vector pipeline
//! that finds many distinct degrees in diverse graphs, the blowup structure
//! decomposition, and control graphs.
//!
//! Everything is `no_std` with `alloc`. Every randomized routine takes an
//! explicit 64-bit seed and is deterministic given it.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod anticonc;
pub mod bitset;
pub mod control;
pub mod fraction;
pub mod generators;
pub mod graph;
pub mod oracle;
pub mod pipeline;
pub mod rng;
pub mod structure;

pub use bitset::VertexSet;
pub use fraction::Fraction;
pub use graph::{BlowupPattern, DegreeProfile, Graph, GraphBuilder, GraphError};
