//! Sparse maps of bounded-degree simplicial complexes into integer lattices,
//! a width-aware variant for graphs, and an independent sparsity verifier.

pub mod complex;
pub mod embedder;
pub mod error;
pub mod export;
pub mod extension;
pub mod harness;
pub mod lattice;
pub mod placement;
pub mod verify;
pub mod width;

pub use complex::{Simplex, SimplicialComplex};
pub use embedder::{embed, embed_with, LatticeMap};
pub use error::{Error, Result};
pub use verify::{verify, SparsityCertificate};
