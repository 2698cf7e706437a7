//! Chebyshev spectral graph convolution.
//!
//! The filter is a degree-`K-1` polynomial of the rescaled Laplacian,
//! evaluated through the three-term recursion on feature matrices:
//!
//! ```text
//! h = sum_k T_k(L) x Theta_k + bias
//! T_0 x = x,  T_1 x = L x,  T_k x = 2 L T_{k-1} x - T_{k-2} x
//! ```
//!
//! Only sparse-times-dense products against `L` are ever formed; no dense
//! `N x N` polynomial of the Laplacian is materialized. The backward pass
//! relies on `L` being symmetric, which makes every `T_k(L)` its own
//! transpose.

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct ChebConvParams {
    /// One `F_in x F_out` coefficient matrix per polynomial order.
    pub theta: Vec<DenseMatrix>,
    /// Per-output-channel offset.
    pub bias: Vec<f64>,
}

impl ChebConvParams {
    pub fn zeros(order: usize, f_in: usize, f_out: usize) -> Result<ChebConvParams> {
        if order == 0 {
            return Err(CoreError::invalid("Chebyshev order must be at least 1"));
        }
        Ok(ChebConvParams {
            theta: vec![DenseMatrix::zeros(f_in, f_out); order],
            bias: vec![0.0; f_out],
        })
    }

    pub fn order(&self) -> usize {
        self.theta.len()
    }

    pub fn f_in(&self) -> usize {
        self.theta[0].rows()
    }

    pub fn f_out(&self) -> usize {
        self.theta[0].cols()
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta.is_empty() {
            return Err(CoreError::invalid("Chebyshev order must be at least 1"));
        }
        let (f_in, f_out) = (self.f_in(), self.f_out());
        for t in &self.theta {
            if t.rows() != f_in || t.cols() != f_out {
                return Err(CoreError::shape(
                    "all Chebyshev coefficient matrices must share one shape",
                ));
            }
            if !t.is_finite() {
                return Err(CoreError::invalid("non-finite Chebyshev coefficient"));
            }
        }
        if self.bias.len() != f_out {
            return Err(CoreError::shape(format!(
                "bias has {} entries for {} output channels",
                self.bias.len(),
                f_out
            )));
        }
        if !self.bias.iter().all(|b| b.is_finite()) {
            return Err(CoreError::invalid("non-finite bias"));
        }
        Ok(())
    }
}

/// Gradients of a convolution's parameters; shapes mirror [`ChebConvParams`].
#[derive(Debug, Clone)]
pub struct ChebConvGrads {
    pub theta: Vec<DenseMatrix>,
    pub bias: Vec<f64>,
}

fn check_shapes(x: &DenseMatrix, l_scaled: &SparseMatrix, p: &ChebConvParams) -> Result<()> {
    p.validate()?;
    if l_scaled.rows() != l_scaled.cols() {
        return Err(CoreError::shape(format!(
            "rescaled Laplacian is {}x{}, expected square",
            l_scaled.rows(),
            l_scaled.cols()
        )));
    }
    if x.rows() != l_scaled.rows() {
        return Err(CoreError::shape(format!(
            "features have {} rows but the Laplacian is {}x{}",
            x.rows(),
            l_scaled.rows(),
            l_scaled.cols()
        )));
    }
    if x.cols() != p.f_in() {
        return Err(CoreError::shape(format!(
            "features have {} channels but the filter expects {}",
            x.cols(),
            p.f_in()
        )));
    }
    Ok(())
}

/// The stack `[T_0(L)x, ..., T_{K-1}(L)x]` via the three-term recursion.
fn chebyshev_basis(x: &DenseMatrix, l_scaled: &SparseMatrix, order: usize) -> Result<Vec<DenseMatrix>> {
    let mut basis = Vec::with_capacity(order);
    basis.push(x.clone());
    if order >= 2 {
        basis.push(l_scaled.mul_dense(x)?);
    }
    for k in 2..order {
        let mut t = l_scaled.mul_dense(&basis[k - 1])?;
        t.scale_in_place(2.0);
        t.add_scaled(&basis[k - 2], -1.0)?;
        basis.push(t);
    }
    Ok(basis)
}

pub fn cheb_conv_forward(
    x: &DenseMatrix,
    l_scaled: &SparseMatrix,
    p: &ChebConvParams,
) -> Result<DenseMatrix> {
    check_shapes(x, l_scaled, p)?;
    let mut out = x.matmul(&p.theta[0])?;
    if p.order() >= 2 {
        let mut t_prev2 = x.clone();
        let mut t_prev1 = l_scaled.mul_dense(x)?;
        out.add_scaled(&t_prev1.matmul(&p.theta[1])?, 1.0)?;
        for k in 2..p.order() {
            let mut t = l_scaled.mul_dense(&t_prev1)?;
            t.scale_in_place(2.0);
            t.add_scaled(&t_prev2, -1.0)?;
            out.add_scaled(&t.matmul(&p.theta[k])?, 1.0)?;
            t_prev2 = t_prev1;
            t_prev1 = t;
        }
    }
    out.add_row_vector(&p.bias)?;
    Ok(out)
}

/// Reverse-mode gradients of [`cheb_conv_forward`].
///
/// Re-runs the recursion to recover the basis stack, then accumulates the
/// adjoint of the recursion backwards; `grad_x` uses `T_k(L)^T = T_k(L)`.
pub fn cheb_conv_backward(
    x: &DenseMatrix,
    l_scaled: &SparseMatrix,
    p: &ChebConvParams,
    upstream: &DenseMatrix,
) -> Result<(ChebConvGrads, DenseMatrix)> {
    check_shapes(x, l_scaled, p)?;
    if upstream.rows() != x.rows() || upstream.cols() != p.f_out() {
        return Err(CoreError::shape(format!(
            "upstream gradient is {}x{}, expected {}x{}",
            upstream.rows(),
            upstream.cols(),
            x.rows(),
            p.f_out()
        )));
    }

    let order = p.order();
    let basis = chebyshev_basis(x, l_scaled, order)?;

    let theta = basis
        .iter()
        .map(|t| t.matmul_tn(upstream))
        .collect::<Result<Vec<_>>>()?;
    let bias = upstream.column_sums();

    // adjoint[k] starts as the direct use of T_k x and absorbs the recursion
    // terms of every higher order.
    let mut adjoint = p
        .theta
        .iter()
        .map(|t| upstream.matmul_nt(t))
        .collect::<Result<Vec<_>>>()?;
    for k in (2..order).rev() {
        let propagated = l_scaled.mul_dense(&adjoint[k])?;
        adjoint[k - 1].add_scaled(&propagated, 2.0)?;
        let (lo, hi) = adjoint.split_at_mut(k);
        lo[k - 2].add_scaled(&hi[0], -1.0)?;
    }
    let mut grad_x = adjoint[0].clone();
    if order >= 2 {
        grad_x.add_scaled(&l_scaled.mul_dense(&adjoint[1])?, 1.0)?;
    }

    Ok((ChebConvGrads { theta, bias }, grad_x))
}
