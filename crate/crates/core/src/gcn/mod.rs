//! Differentiable layers for spectral mesh convolution networks.
//!
//! Forward passes are plain functions over [`DenseMatrix`] features; each has
//! a hand-written reverse-mode companion returning parameter gradients plus
//! the input gradient. There is no autodiff tape — the decoder's topology is
//! fixed, so composition happens explicitly in the model layer. Everything
//! here is validated against the finite-difference utilities in
//! [`gradcheck`].
//!
//! [`DenseMatrix`]: crate::dense::DenseMatrix

mod activation;
mod block;
mod cheb;
mod linear;
mod norm;
mod resample;

pub mod gradcheck;

pub use activation::{leaky_relu, leaky_relu_backward};
pub use block::{
    resgcn_block_backward, resgcn_block_forward, ResGcnBlockCache, ResGcnBlockGrads,
    ResGcnBlockParams,
};
pub use cheb::{cheb_conv_backward, cheb_conv_forward, ChebConvGrads, ChebConvParams};
pub use linear::{dense_backward, dense_forward, DenseGrads, DenseParams};
pub use norm::{
    instance_norm_backward, instance_norm_forward, InstanceNormCache, InstanceNormGrads,
    InstanceNormParams,
};
pub use resample::{upsample_backward, upsample_forward};
