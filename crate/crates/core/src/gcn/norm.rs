//! Instance normalization over the vertex dimension.
//!
//! Statistics are taken per channel within a single sample — across the N
//! vertices, never across samples — then a learnable affine is applied.
//! Population variance (divide by N) keeps the normalized statistics exact.

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceNormParams {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
    pub eps: f64,
}

impl InstanceNormParams {
    /// Identity-affine parameters: gamma 1, beta 0.
    pub fn identity(channels: usize, eps: f64) -> Result<InstanceNormParams> {
        if eps <= 0.0 {
            return Err(CoreError::invalid("instance-norm eps must be positive"));
        }
        Ok(InstanceNormParams {
            gamma: vec![1.0; channels],
            beta: vec![0.0; channels],
            eps,
        })
    }

    pub fn channels(&self) -> usize {
        self.gamma.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.eps <= 0.0 {
            return Err(CoreError::invalid("instance-norm eps must be positive"));
        }
        if self.gamma.len() != self.beta.len() {
            return Err(CoreError::shape(format!(
                "gamma has {} channels, beta has {}",
                self.gamma.len(),
                self.beta.len()
            )));
        }
        Ok(())
    }
}

/// Forward intermediates needed by the backward pass.
#[derive(Debug, Clone)]
pub struct InstanceNormCache {
    /// Normalized pre-affine activations.
    pub xhat: DenseMatrix,
    /// Per-channel `1 / sqrt(var + eps)`.
    pub inv_std: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct InstanceNormGrads {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
}

pub fn instance_norm_forward(
    x: &DenseMatrix,
    p: &InstanceNormParams,
) -> Result<(DenseMatrix, InstanceNormCache)> {
    p.validate()?;
    let (n, channels) = (x.rows(), x.cols());
    if channels != p.channels() {
        return Err(CoreError::shape(format!(
            "input has {channels} channels but the norm has {}",
            p.channels()
        )));
    }
    if n < 2 {
        return Err(CoreError::invalid(
            "instance norm needs at least 2 vertices to form statistics",
        ));
    }

    let mut mean = x.column_sums();
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut var = vec![0.0; channels];
    for i in 0..n {
        for (f, &v) in x.row(i).iter().enumerate() {
            let d = v - mean[f];
            var[f] += d * d;
        }
    }
    let inv_std: Vec<f64> = var
        .iter()
        .map(|&v| 1.0 / (v / n as f64 + p.eps).sqrt())
        .collect();

    let mut xhat = DenseMatrix::zeros(n, channels);
    let mut out = DenseMatrix::zeros(n, channels);
    for i in 0..n {
        let src = x.row(i);
        for f in 0..channels {
            let h = (src[f] - mean[f]) * inv_std[f];
            xhat.row_mut(i)[f] = h;
            out.row_mut(i)[f] = p.gamma[f] * h + p.beta[f];
        }
    }
    Ok((out, InstanceNormCache { xhat, inv_std }))
}

/// Reverse-mode gradients of [`instance_norm_forward`].
///
/// Both the mean and the variance depend on every vertex, so the input
/// gradient mixes the per-channel sums of the upstream signal:
///
/// ```text
/// dx = inv_std / N * (N*dxhat - sum(dxhat) - xhat * sum(dxhat*xhat))
/// ```
pub fn instance_norm_backward(
    cache: &InstanceNormCache,
    p: &InstanceNormParams,
    upstream: &DenseMatrix,
) -> Result<(InstanceNormGrads, DenseMatrix)> {
    let (n, channels) = (cache.xhat.rows(), cache.xhat.cols());
    if upstream.rows() != n || upstream.cols() != channels {
        return Err(CoreError::shape(format!(
            "upstream gradient is {}x{}, expected {}x{}",
            upstream.rows(),
            upstream.cols(),
            n,
            channels
        )));
    }

    let mut grad_gamma = vec![0.0; channels];
    let mut grad_beta = vec![0.0; channels];
    let mut sum_dxhat = vec![0.0; channels];
    let mut sum_dxhat_xhat = vec![0.0; channels];
    for i in 0..n {
        let g = upstream.row(i);
        let h = cache.xhat.row(i);
        for f in 0..channels {
            grad_beta[f] += g[f];
            grad_gamma[f] += g[f] * h[f];
            let dxhat = g[f] * p.gamma[f];
            sum_dxhat[f] += dxhat;
            sum_dxhat_xhat[f] += dxhat * h[f];
        }
    }

    let nf = n as f64;
    let mut grad_x = DenseMatrix::zeros(n, channels);
    for i in 0..n {
        let g = upstream.row(i);
        let h = cache.xhat.row(i);
        let dst = grad_x.row_mut(i);
        for f in 0..channels {
            let dxhat = g[f] * p.gamma[f];
            dst[f] =
                cache.inv_std[f] / nf * (nf * dxhat - sum_dxhat[f] - h[f] * sum_dxhat_xhat[f]);
        }
    }

    Ok((
        InstanceNormGrads {
            gamma: grad_gamma,
            beta: grad_beta,
        },
        grad_x,
    ))
}
