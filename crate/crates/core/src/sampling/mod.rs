//! Mesh decimation and the inter-level sampling operators.
//!
//! Coarse hierarchy levels come from quadric-error half-edge collapse
//! ([`decimate`]); because collapses only ever delete vertices, every coarse
//! vertex is an original vertex and downsampling is plain row selection. The
//! matching upsampling operator places removed vertices back by barycentric
//! interpolation over their nearest coarse triangle, which is what lets
//! decoder features flow from the coarsest level back to full resolution.

mod decimate;
mod hierarchy;
mod quadric;
mod store;
mod upsample;

pub use decimate::{boundary_edges, decimate, vertex_quadrics, Decimation, VertexQuadrics};
pub use hierarchy::{build_hierarchy, HierarchyLevel, MeshHierarchy, SamplingPair};
pub use quadric::Quadric;
pub use store::{load_hierarchy, save_hierarchy};
pub use upsample::{downsampling_matrix, upsampling_matrix};
