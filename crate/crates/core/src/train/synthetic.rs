//! Procedural dataset of smooth deformations of a base mesh.
//!
//! Each sample is `Y = base + sum_j z_j * B_j` for a latent code
//! `z ~ U(-1, 1)^d` and fixed displacement fields `B_j`. The fields are
//! random noise driven through repeated neighbor averaging, which leaves
//! only the low-frequency content, then centered so no field carries a net
//! translation, and rescaled to a common amplitude. Targets are exactly
//! affine in `z` by construction.

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};
use crate::graph::adjacency;
use crate::mesh::Mesh;
use crate::sparse::SparseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub latent_dim: usize,
    pub sample_count: usize,
    pub seed: u64,
    /// Root-mean-square vertex displacement of each basis field.
    pub amplitude: f64,
    /// Neighbor-averaging passes applied to the raw noise fields.
    pub smoothing_rounds: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            latent_dim: 8,
            sample_count: 500,
            seed: 0,
            amplitude: 0.3,
            smoothing_rounds: 30,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.latent_dim == 0 {
            return Err(CoreError::invalid("latent dimension must be at least 1"));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(CoreError::invalid(format!(
                "field amplitude must be positive and finite, got {}",
                self.amplitude
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub z: Vec<f64>,
    pub target: DenseMatrix,
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub base: DenseMatrix,
    pub basis: Vec<DenseMatrix>,
    pub samples: Vec<Sample>,
}

impl SyntheticDataset {
    /// Target for an arbitrary latent code under the dataset's fields.
    pub fn synthesize(&self, z: &[f64]) -> Result<DenseMatrix> {
        if z.len() != self.basis.len() {
            return Err(CoreError::shape(format!(
                "latent code has {} entries but the dataset has {} fields",
                z.len(),
                self.basis.len()
            )));
        }
        let mut target = self.base.clone();
        for (coeff, field) in z.iter().zip(&self.basis) {
            target.add_scaled(field, *coeff)?;
        }
        Ok(target)
    }
}

/// Row-stochastic averaging of each vertex with its neighbors.
fn averaging_operator(mesh: &Mesh) -> Result<SparseMatrix> {
    let adj = adjacency(mesh);
    let n = adj.rows();
    let mut triplets = Vec::new();
    for i in 0..n {
        let (neighbors, _) = adj.row_entries(i);
        let scale = 1.0 / (1.0 + neighbors.len() as f64);
        triplets.push((i, i, scale));
        for &j in neighbors {
            triplets.push((i, j, scale));
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets)
}

fn displacement_field(
    rng: &mut ChaCha8Rng,
    smoother: &SparseMatrix,
    spec: &SyntheticSpec,
) -> Result<DenseMatrix> {
    let n = smoother.rows();
    let mut field = DenseMatrix::from_fn(n, 3, |_, _| rng.gen_range(-1.0..1.0));
    for _ in 0..spec.smoothing_rounds {
        field = smoother.mul_dense(&field)?;
    }
    // Averaging converges on the constant (net translation) component, which
    // is not a deformation; project it out so field energy stays in the
    // non-null low-frequency modes before fixing the amplitude.
    for c in 0..3 {
        let mean = (0..n).map(|r| field.get(r, c)).sum::<f64>() / n as f64;
        for r in 0..n {
            field.set(r, c, field.get(r, c) - mean);
        }
    }
    let rms = field.frobenius_norm() / (n as f64).sqrt();
    if rms <= 0.0 {
        return Err(CoreError::numerical(
            "smoothed displacement field collapsed to zero",
        ));
    }
    field.scale_in_place(spec.amplitude / rms);
    Ok(field)
}

pub fn generate_synthetic(mesh: &Mesh, spec: &SyntheticSpec) -> Result<SyntheticDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let smoother = averaging_operator(mesh)?;

    // Fields are drawn before any latent codes, so extending the sample
    // count leaves the deformation family untouched.
    let basis: Vec<DenseMatrix> = (0..spec.latent_dim)
        .map(|_| displacement_field(&mut rng, &smoother, spec))
        .collect::<Result<_>>()?;

    let base = mesh.coords();
    let dataset = SyntheticDataset {
        base,
        basis,
        samples: Vec::new(),
    };
    let mut samples = Vec::with_capacity(spec.sample_count);
    for _ in 0..spec.sample_count {
        let z: Vec<f64> = (0..spec.latent_dim)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let target = dataset.synthesize(&z)?;
        samples.push(Sample { z, target });
    }
    Ok(SyntheticDataset { samples, ..dataset })
}
