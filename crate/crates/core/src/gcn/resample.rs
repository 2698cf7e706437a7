//! Applying sampling operators to feature matrices.
//!
//! Up- and down-sampling are fixed linear maps, so the backward pass is a
//! multiplication by the transposed operator.

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};
use crate::sparse::SparseMatrix;

/// `up * x`: coarse features lifted to the fine level.
pub fn upsample_forward(x: &DenseMatrix, up: &SparseMatrix) -> Result<DenseMatrix> {
    if up.cols() != x.rows() {
        return Err(CoreError::shape(format!(
            "upsampling matrix has {} columns but features have {} rows",
            up.cols(),
            x.rows()
        )));
    }
    up.mul_dense(x)
}

/// `up^T * upstream`: fine-level gradients pushed back to the coarse level.
pub fn upsample_backward(upstream: &DenseMatrix, up: &SparseMatrix) -> Result<DenseMatrix> {
    if up.rows() != upstream.rows() {
        return Err(CoreError::shape(format!(
            "upsampling matrix has {} rows but the gradient has {}",
            up.rows(),
            upstream.rows()
        )));
    }
    up.transpose().mul_dense(upstream)
}
