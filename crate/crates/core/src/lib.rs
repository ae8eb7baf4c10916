//! Oriented-matroid covector systems, tope graphs, oriented-matroid programs,
//! and proper unlabeled sample compression schemes built from reconstructible
//! maps on tope graphs.

pub mod arrangements;
pub mod axioms;
pub mod compression;
pub mod error;
pub mod extensions;
pub mod program;
pub mod reconstruct;
pub mod sign;
pub mod tope_graph;

pub use error::{Error, ParseError, Result};
pub use sign::{ElementSet, GroundSet, Sign, SignSystem, SignVector};
