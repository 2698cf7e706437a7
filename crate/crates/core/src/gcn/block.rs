//! Residual graph-convolution block.
//!
//! Two Chebyshev convolutions, each followed by instance normalization, with
//! a leaky activation after the first normalization and after the residual
//! addition:
//!
//! ```text
//! out = act( IN2(conv2( act(IN1(conv1(x))) )) + shortcut(x) )
//! ```
//!
//! The shortcut is the identity when input and output channel counts agree,
//! and an order-1 Chebyshev convolution (a per-vertex channel projection)
//! otherwise.

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};
use crate::sparse::SparseMatrix;

use super::activation::{leaky_relu, leaky_relu_backward};
use super::cheb::{cheb_conv_backward, cheb_conv_forward, ChebConvGrads, ChebConvParams};
use super::norm::{
    instance_norm_backward, instance_norm_forward, InstanceNormCache, InstanceNormGrads,
    InstanceNormParams,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ResGcnBlockParams {
    pub conv1: ChebConvParams,
    pub in1: InstanceNormParams,
    pub conv2: ChebConvParams,
    pub in2: InstanceNormParams,
    /// Order-1 channel projection; present exactly when `f_in != f_out`.
    pub shortcut: Option<ChebConvParams>,
}

impl ResGcnBlockParams {
    pub fn f_in(&self) -> usize {
        self.conv1.f_in()
    }

    pub fn f_out(&self) -> usize {
        self.conv2.f_out()
    }

    pub fn validate(&self) -> Result<()> {
        self.conv1.validate()?;
        self.conv2.validate()?;
        self.in1.validate()?;
        self.in2.validate()?;
        if self.conv1.f_out() != self.conv2.f_in() {
            return Err(CoreError::shape(format!(
                "first convolution emits {} channels, second expects {}",
                self.conv1.f_out(),
                self.conv2.f_in()
            )));
        }
        if self.in1.channels() != self.conv1.f_out() || self.in2.channels() != self.conv2.f_out() {
            return Err(CoreError::shape(
                "normalization channel counts must match their convolutions",
            ));
        }
        match &self.shortcut {
            Some(sc) => {
                sc.validate()?;
                if self.f_in() == self.f_out() {
                    return Err(CoreError::invalid(
                        "projection shortcut present although channels already match",
                    ));
                }
                if sc.order() != 1 || sc.f_in() != self.f_in() || sc.f_out() != self.f_out() {
                    return Err(CoreError::shape(
                        "shortcut must be an order-1 projection from f_in to f_out",
                    ));
                }
            }
            None => {
                if self.f_in() != self.f_out() {
                    return Err(CoreError::shape(format!(
                        "block maps {} to {} channels and needs a projection shortcut",
                        self.f_in(),
                        self.f_out()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ResGcnBlockGrads {
    pub conv1: ChebConvGrads,
    pub in1: InstanceNormGrads,
    pub conv2: ChebConvGrads,
    pub in2: InstanceNormGrads,
    pub shortcut: Option<ChebConvGrads>,
}

#[derive(Debug, Clone)]
pub struct ResGcnBlockCache {
    input: DenseMatrix,
    norm1: InstanceNormCache,
    pre_act1: DenseMatrix,
    act1: DenseMatrix,
    norm2: InstanceNormCache,
    pre_out: DenseMatrix,
}

pub fn resgcn_block_forward(
    x: &DenseMatrix,
    l_scaled: &SparseMatrix,
    p: &ResGcnBlockParams,
    slope: f64,
) -> Result<(DenseMatrix, ResGcnBlockCache)> {
    p.validate()?;
    let h1 = cheb_conv_forward(x, l_scaled, &p.conv1)?;
    let (pre_act1, norm1) = instance_norm_forward(&h1, &p.in1)?;
    let act1 = leaky_relu(&pre_act1, slope)?;
    let h2 = cheb_conv_forward(&act1, l_scaled, &p.conv2)?;
    let (normed2, norm2) = instance_norm_forward(&h2, &p.in2)?;

    let mut pre_out = match &p.shortcut {
        Some(sc) => cheb_conv_forward(x, l_scaled, sc)?,
        None => x.clone(),
    };
    pre_out.add_scaled(&normed2, 1.0)?;
    let out = leaky_relu(&pre_out, slope)?;

    Ok((
        out,
        ResGcnBlockCache {
            input: x.clone(),
            norm1,
            pre_act1,
            act1,
            norm2,
            pre_out,
        },
    ))
}

pub fn resgcn_block_backward(
    l_scaled: &SparseMatrix,
    p: &ResGcnBlockParams,
    slope: f64,
    cache: &ResGcnBlockCache,
    upstream: &DenseMatrix,
) -> Result<(ResGcnBlockGrads, DenseMatrix)> {
    let d_sum = leaky_relu_backward(&cache.pre_out, slope, upstream)?;

    let (in2_grads, d_h2) = instance_norm_backward(&cache.norm2, &p.in2, &d_sum)?;
    let (conv2_grads, d_act1) = cheb_conv_backward(&cache.act1, l_scaled, &p.conv2, &d_h2)?;
    let d_pre_act1 = leaky_relu_backward(&cache.pre_act1, slope, &d_act1)?;
    let (in1_grads, d_h1) = instance_norm_backward(&cache.norm1, &p.in1, &d_pre_act1)?;
    let (conv1_grads, mut grad_x) = cheb_conv_backward(&cache.input, l_scaled, &p.conv1, &d_h1)?;

    let shortcut_grads = match &p.shortcut {
        Some(sc) => {
            let (sc_grads, d_x_sc) = cheb_conv_backward(&cache.input, l_scaled, sc, &d_sum)?;
            grad_x.add_scaled(&d_x_sc, 1.0)?;
            Some(sc_grads)
        }
        None => {
            grad_x.add_scaled(&d_sum, 1.0)?;
            None
        }
    };

    Ok((
        ResGcnBlockGrads {
            conv1: conv1_grads,
            in1: in1_grads,
            conv2: conv2_grads,
            in2: in2_grads,
            shortcut: shortcut_grads,
        },
        grad_x,
    ))
}
