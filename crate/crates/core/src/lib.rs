//! Mesh coordinate regression on triangle meshes.
//!
//! The crate provides the full stack needed to regress dense per-vertex
//! coordinates with spectral graph convolutions:
//!
//! - [`mesh`] / [`obj`]: triangle meshes and Wavefront OBJ I/O
//! - [`sparse`] / [`dense`]: the two matrix representations everything runs on
//! - [`graph`]: adjacency, normalized/unnormalized/rescaled Laplacians,
//!   power-iteration spectral bounds
//! - [`sampling`]: quadric-error decimation, mesh hierarchies, and the
//!   sparse up/down sampling operators between hierarchy levels
//! - [`gcn`]: Chebyshev convolution, instance normalization, activations and
//!   residual blocks, each with hand-written reverse-mode gradients
//! - [`model`]: the latent-to-mesh decoder, parameter init, checkpoints
//! - [`train`]: losses, Adam, synthetic datasets, and the training loop
//! - [`eval`]: NME, cumulative error curves, and rigid ICP alignment
//!
//! All numerics are `f64` and all randomized procedures take explicit seeds;
//! given equal inputs every public operation is bit-reproducible.

pub mod dense;
pub mod error;
pub mod eval;
pub mod gcn;
pub mod graph;
pub mod kv;
pub mod mesh;
pub mod model;
pub mod obj;
pub mod sampling;
pub mod sparse;
pub mod spatial;
pub mod train;

pub use dense::DenseMatrix;
pub use error::{CoreError, Result};
pub use mesh::Mesh;
pub use sparse::SparseMatrix;
