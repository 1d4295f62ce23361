//! File formats, experiment sweeps and witness checking for the `ddeg`
//! command-line tool.
//!
//! Vertex ids are 0-based everywhere except in DIMACS files, which use the
//! usual 1-based numbering.

pub mod dimacs;
pub mod experiments;
pub mod records;
pub mod witness;
