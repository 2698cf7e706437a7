//! Toy affine encoder.
//!
//! The full image encoder is out of scope; this minimal affine map from an
//! observation vector to a latent code exists so encoder-to-decoder
//! gradient flow can be exercised end to end in tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AffineEncoder {
    /// `input_dim x latent_dim`.
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct AffineEncoderGrads {
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
}

impl AffineEncoder {
    pub fn init(input_dim: usize, latent_dim: usize, seed: u64) -> AffineEncoder {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = (6.0 / (input_dim + latent_dim) as f64).sqrt();
        AffineEncoder {
            weights: DenseMatrix::from_fn(input_dim, latent_dim, |_, _| rng.gen_range(-s..s)),
            bias: vec![0.0; latent_dim],
        }
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.weights.rows() {
            return Err(CoreError::shape(format!(
                "encoder input has {} entries, expected {}",
                input.len(),
                self.weights.rows()
            )));
        }
        let mut z = self.bias.clone();
        for (i, &x) in input.iter().enumerate() {
            for (o, &w) in z.iter_mut().zip(self.weights.row(i)) {
                *o += x * w;
            }
        }
        Ok(z)
    }

    pub fn backward(
        &self,
        input: &[f64],
        upstream_latent: &[f64],
    ) -> Result<(AffineEncoderGrads, Vec<f64>)> {
        if input.len() != self.weights.rows() || upstream_latent.len() != self.weights.cols() {
            return Err(CoreError::shape("encoder gradient shape mismatch"));
        }
        let grads = AffineEncoderGrads {
            weights: DenseMatrix::outer(input, upstream_latent),
            bias: upstream_latent.to_vec(),
        };
        let grad_input = (0..input.len())
            .map(|i| {
                self.weights
                    .row(i)
                    .iter()
                    .zip(upstream_latent)
                    .map(|(&w, &g)| w * g)
                    .sum()
            })
            .collect();
        Ok((grads, grad_input))
    }
}
