//! The dense map from a latent vector to coarsest-level vertex features.

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseParams {
    /// `latent_dim x (vertices * channels)`.
    pub weights: DenseMatrix,
    /// One entry per output feature, laid out row-major like the output.
    pub bias: Vec<f64>,
    /// Vertex count of the output feature matrix.
    pub vertices: usize,
    /// Channel count of the output feature matrix.
    pub channels: usize,
}

impl DenseParams {
    pub fn zeros(latent_dim: usize, vertices: usize, channels: usize) -> DenseParams {
        DenseParams {
            weights: DenseMatrix::zeros(latent_dim, vertices * channels),
            bias: vec![0.0; vertices * channels],
            vertices,
            channels,
        }
    }

    pub fn latent_dim(&self) -> usize {
        self.weights.rows()
    }

    pub fn validate(&self) -> Result<()> {
        let out = self.vertices * self.channels;
        if self.weights.cols() != out || self.bias.len() != out {
            return Err(CoreError::shape(format!(
                "dense map emits {} features but targets {} vertices x {} channels",
                self.weights.cols(),
                self.vertices,
                self.channels
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DenseGrads {
    pub weights: DenseMatrix,
    pub bias: Vec<f64>,
}

/// `z^T W + b`, reshaped row-major to `vertices x channels`.
pub fn dense_forward(z: &[f64], p: &DenseParams) -> Result<DenseMatrix> {
    p.validate()?;
    if z.len() != p.latent_dim() {
        return Err(CoreError::shape(format!(
            "latent vector has {} entries, map expects {}",
            z.len(),
            p.latent_dim()
        )));
    }
    let mut out = p.bias.clone();
    for (i, &zi) in z.iter().enumerate() {
        if zi == 0.0 {
            continue;
        }
        for (o, &w) in out.iter_mut().zip(p.weights.row(i)) {
            *o += zi * w;
        }
    }
    DenseMatrix::from_vec(p.vertices, p.channels, out)
}

pub fn dense_backward(
    z: &[f64],
    p: &DenseParams,
    upstream: &DenseMatrix,
) -> Result<(DenseGrads, Vec<f64>)> {
    p.validate()?;
    if z.len() != p.latent_dim() {
        return Err(CoreError::shape("latent length mismatch"));
    }
    if upstream.rows() != p.vertices || upstream.cols() != p.channels {
        return Err(CoreError::shape(format!(
            "upstream gradient is {}x{}, expected {}x{}",
            upstream.rows(),
            upstream.cols(),
            p.vertices,
            p.channels
        )));
    }
    let flat = upstream.as_slice();
    let grads = DenseGrads {
        weights: DenseMatrix::outer(z, flat),
        bias: flat.to_vec(),
    };
    let grad_z = (0..z.len())
        .map(|i| {
            p.weights
                .row(i)
                .iter()
                .zip(flat)
                .map(|(&w, &g)| w * g)
                .sum()
        })
        .collect();
    Ok((grads, grad_z))
}
