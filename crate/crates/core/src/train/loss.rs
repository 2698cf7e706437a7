//! Training losses over predicted vertex coordinates.

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};
use crate::sparse::SparseMatrix;

/// Below this value the smooth loss is treated as zero and its gradient —
/// singular at the origin — is clamped to zero.
const SMOOTH_LOSS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    /// Weight of the smooth term against the L1 term.
    pub alpha: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig { alpha: 0.1 }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(CoreError::invalid(format!(
                "smooth-loss weight must be finite and non-negative, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossBreakdown {
    pub l1: f64,
    pub smooth: f64,
    pub total: f64,
}

fn check_pair(pred: &DenseMatrix, gt: &DenseMatrix) -> Result<()> {
    if pred.rows() != gt.rows() || pred.cols() != gt.cols() {
        return Err(CoreError::shape(format!(
            "prediction is {}x{} but ground truth is {}x{}",
            pred.rows(),
            pred.cols(),
            gt.rows(),
            gt.cols()
        )));
    }
    Ok(())
}

/// Mean absolute deviation over all entries, with its gradient
/// `sign(pred - gt) / count`; the subgradient at 0 is taken as 0.
pub fn l1_loss(pred: &DenseMatrix, gt: &DenseMatrix) -> Result<(f64, DenseMatrix)> {
    check_pair(pred, gt)?;
    let count = (pred.rows() * pred.cols()) as f64;
    let mut sum = 0.0;
    let grad = pred.zip_map(gt, |p, g| {
        let d = p - g;
        sum += d.abs();
        if d > 0.0 {
            1.0 / count
        } else if d < 0.0 {
            -1.0 / count
        } else {
            0.0
        }
    });
    Ok((sum / count, grad))
}

/// Frobenius norm of `lap * pred` — how far each vertex sits from the mean
/// of its neighbors — with gradient `lap * (lap * pred) / loss`.
///
/// `lap` must be the symmetric unnormalized Laplacian `D - W`; the gradient
/// uses that symmetry in place of an explicit transpose.
pub fn smooth_loss(pred: &DenseMatrix, lap: &SparseMatrix) -> Result<(f64, DenseMatrix)> {
    if lap.rows() != lap.cols() || lap.rows() != pred.rows() {
        return Err(CoreError::shape(format!(
            "Laplacian is {}x{} but prediction has {} rows",
            lap.rows(),
            lap.cols(),
            pred.rows()
        )));
    }
    let residual = lap.mul_dense(pred)?;
    let loss = residual.frobenius_norm();
    if loss < SMOOTH_LOSS_FLOOR {
        return Ok((loss, DenseMatrix::zeros(pred.rows(), pred.cols())));
    }
    let mut grad = lap.mul_dense(&residual)?;
    grad.scale_in_place(1.0 / loss);
    Ok((loss, grad))
}

/// `l1 + alpha * smooth` with the correspondingly weighted gradient.
pub fn total_loss(
    pred: &DenseMatrix,
    gt: &DenseMatrix,
    lap: &SparseMatrix,
    cfg: &LossConfig,
) -> Result<(LossBreakdown, DenseMatrix)> {
    cfg.validate()?;
    let (l1, mut grad) = l1_loss(pred, gt)?;
    let (smooth, smooth_grad) = smooth_loss(pred, lap)?;
    grad.add_scaled(&smooth_grad, cfg.alpha)?;
    Ok((
        LossBreakdown {
            l1,
            smooth,
            total: l1 + cfg.alpha * smooth,
        },
        grad,
    ))
}
