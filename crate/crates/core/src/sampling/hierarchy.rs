//! Multi-resolution mesh hierarchies.
//!
//! A hierarchy is an ordered list of levels, finest first, each carrying the
//! graph operators the convolution layers need, plus the sampling pair
//! linking every adjacent fine/coarse level. Built once per topology and
//! reused across training and inference; the fingerprint ties checkpoints to
//! the exact hierarchy they were trained on.

use sha2::{Digest, Sha256};

use crate::error::{CoreError, Result};
use crate::graph::{adjacency, normalized_laplacian, scaled_laplacian, LambdaMax};
use crate::mesh::Mesh;
use crate::sparse::SparseMatrix;

use super::decimate::decimate;
use super::upsample::{downsampling_matrix, upsampling_matrix};

#[derive(Debug, Clone)]
pub struct HierarchyLevel {
    pub mesh: Mesh,
    /// Symmetric normalized Laplacian of the level's adjacency.
    pub laplacian: SparseMatrix,
    /// `2 L / lambda_max - I`, the operator the convolutions run on.
    pub scaled_laplacian: SparseMatrix,
    pub lambda_max: f64,
}

impl HierarchyLevel {
    /// Assembles the graph operators for `mesh`.
    pub fn from_mesh(mesh: Mesh, lambda: &LambdaMax) -> Result<HierarchyLevel> {
        let w = adjacency(&mesh);
        let laplacian = normalized_laplacian(&w)?;
        let lambda_max = lambda.resolve(&laplacian)?;
        let scaled = scaled_laplacian(&laplacian, lambda_max)?;
        Ok(HierarchyLevel {
            mesh,
            laplacian,
            scaled_laplacian: scaled,
            lambda_max,
        })
    }

    /// Rebuilds the operators from a mesh and an already-known lambda.
    pub fn from_mesh_with_lambda(mesh: Mesh, lambda_max: f64) -> Result<HierarchyLevel> {
        let w = adjacency(&mesh);
        let laplacian = normalized_laplacian(&w)?;
        let scaled = scaled_laplacian(&laplacian, lambda_max)?;
        Ok(HierarchyLevel {
            mesh,
            laplacian,
            scaled_laplacian: scaled,
            lambda_max,
        })
    }
}

/// Operators between one fine level and the next coarser one.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPair {
    /// `n x N` binary selection (coarse from fine).
    pub down: SparseMatrix,
    /// `N x n` interpolation (fine from coarse).
    pub up: SparseMatrix,
    /// Original fine index of each coarse vertex, ascending.
    pub kept: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct MeshHierarchy {
    /// Finest level first.
    pub levels: Vec<HierarchyLevel>,
    /// `pairs[k]` connects `levels[k]` (fine) and `levels[k + 1]` (coarse).
    pub pairs: Vec<SamplingPair>,
}

impl MeshHierarchy {
    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.mesh.vertex_count()).collect()
    }

    pub fn coarsest(&self) -> &HierarchyLevel {
        self.levels.last().expect("hierarchy has at least one level")
    }

    pub fn finest(&self) -> &HierarchyLevel {
        self.levels.first().expect("hierarchy has at least one level")
    }

    /// Digest of the level sizes and sampling matrices. Checkpoints store it
    /// so that parameters are never silently applied to a different
    /// hierarchy than they were trained on.
    pub fn fingerprint(&self) -> u64 {
        let mut hasher = Sha256::new();
        hasher.update((self.levels.len() as u64).to_le_bytes());
        for level in &self.levels {
            hasher.update((level.mesh.vertex_count() as u64).to_le_bytes());
            hasher.update((level.mesh.face_count() as u64).to_le_bytes());
        }
        for pair in &self.pairs {
            hasher.update((pair.kept.len() as u64).to_le_bytes());
            for &k in &pair.kept {
                hasher.update((k as u64).to_le_bytes());
            }
            for m in [&pair.down, &pair.up] {
                hasher.update((m.rows() as u64).to_le_bytes());
                hasher.update((m.cols() as u64).to_le_bytes());
                hasher.update((m.nnz() as u64).to_le_bytes());
                for (r, c, v) in m.iter() {
                    hasher.update((r as u64).to_le_bytes());
                    hasher.update((c as u64).to_le_bytes());
                    hasher.update(v.to_le_bytes());
                }
            }
        }
        let digest = hasher.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
    }
}

/// Builds a hierarchy by repeated decimation of `mesh` to each target size.
///
/// `targets` are the coarse vertex counts in decreasing order, excluding the
/// input size. Decimation that stalls before its target (no legal collapse
/// left) is an error here: a hierarchy with unexpected level sizes would
/// silently mismatch the decoder configuration.
pub fn build_hierarchy(
    mesh: &Mesh,
    targets: &[usize],
    boundary_weight: f64,
    lambda: LambdaMax,
) -> Result<MeshHierarchy> {
    if targets.is_empty() {
        return Err(CoreError::invalid("hierarchy needs at least one target"));
    }
    let mut prev = mesh.vertex_count();
    for &t in targets {
        if t >= prev {
            return Err(CoreError::invalid(format!(
                "targets must strictly decrease: {t} after {prev}"
            )));
        }
        prev = t;
    }

    let mut levels = vec![HierarchyLevel::from_mesh(mesh.clone(), &lambda)?];
    let mut pairs = Vec::with_capacity(targets.len());
    for &target in targets {
        let fine_mesh = &levels.last().expect("non-empty").mesh;
        let dec = decimate(fine_mesh, target, boundary_weight)?;
        if !dec.reached_target {
            return Err(CoreError::numerical(format!(
                "decimation stalled at {} vertices before reaching target {target}",
                dec.mesh.vertex_count()
            )));
        }
        let up = upsampling_matrix(fine_mesh, &dec.mesh, &dec.kept)?;
        let down = downsampling_matrix(fine_mesh.vertex_count(), &dec.kept)?;
        pairs.push(SamplingPair {
            down,
            up,
            kept: dec.kept,
        });
        levels.push(HierarchyLevel::from_mesh(dec.mesh, &lambda)?);
    }

    Ok(MeshHierarchy { levels, pairs })
}
