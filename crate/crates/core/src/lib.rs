//! Bounded modulo-k orientations, parity-constrained factors and
//! lifting-based factor decompositions of highly edge-connected multigraphs.
//!
//! Every constructive routine re-verifies its output before returning it; a
//! failed self-check surfaces as [`Error::Contract`].

pub mod alpha;
pub mod connectivity;
pub mod decomposition;
pub mod error;
pub mod factor;
pub mod graph;
pub mod harness;
pub mod lifting;
pub mod orientation;
pub mod tree_packing;

pub use error::{Error, Result};
pub use graph::{Dir, Edge, EdgeId, MultiGraph, Orientation, ResidueMap, Step, VertexSet};
