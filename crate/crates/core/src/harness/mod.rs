//! Generators, file formats, acceptance suites and conjecture probes.

pub mod gen;
pub mod io;
pub mod probe;
pub mod suites;
