//! The latent-to-mesh decoder.
//!
//! A dense map expands the latent vector into features on the coarsest
//! level; one residual graph-convolution block runs per hierarchy level,
//! coarsest first, with an upsampling apply between levels; two head
//! convolutions on the finest level produce the 3D coordinates — the first
//! with normalization and activation, the last purely linear so the output
//! range is unconstrained.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};
use crate::gcn::{
    cheb_conv_backward, cheb_conv_forward, dense_backward, dense_forward, instance_norm_backward,
    instance_norm_forward, leaky_relu, leaky_relu_backward, resgcn_block_backward,
    resgcn_block_forward, upsample_backward, upsample_forward, ChebConvGrads, ChebConvParams,
    DenseGrads, DenseParams, InstanceNormCache, InstanceNormGrads, InstanceNormParams,
    ResGcnBlockCache, ResGcnBlockGrads, ResGcnBlockParams,
};
use crate::graph::LambdaMax;
use crate::sampling::MeshHierarchy;
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderConfig {
    pub latent_dim: usize,
    pub cheb_order: usize,
    /// Output channels of each block, coarsest level first.
    pub block_channels: Vec<usize>,
    /// Channels of the two head convolutions; the last must be 3.
    pub head_channels: [usize; 2],
    pub leaky_slope: f64,
    pub instance_norm_eps: f64,
    pub lambda: LambdaMax,
    pub seed: u64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            latent_dim: 256,
            cheb_order: 3,
            block_channels: vec![128, 64, 32, 32, 16, 16],
            head_channels: [16, 3],
            leaky_slope: 0.2,
            instance_norm_eps: 1e-5,
            lambda: LambdaMax::default(),
            seed: 0,
        }
    }
}

impl DecoderConfig {
    /// Serializes to the flat `key = value` form used by config files and
    /// checkpoint snapshots.
    pub fn to_kv(&self) -> crate::kv::KvMap {
        let join = |list: &[usize]| {
            list.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut kv = crate::kv::KvMap::new();
        kv.set("latent_dim", self.latent_dim);
        kv.set("cheb_order", self.cheb_order);
        kv.set("block_channels", join(&self.block_channels));
        kv.set("head_channels", join(&self.head_channels));
        kv.set("leaky_slope", self.leaky_slope);
        kv.set("instance_norm_eps", self.instance_norm_eps);
        kv.set("seed", self.seed);
        match self.lambda {
            LambdaMax::PowerIteration { tol, max_iters } => {
                kv.set("lambda_strategy", "power");
                kv.set("lambda_tol", tol);
                kv.set("lambda_max_iters", max_iters);
            }
            LambdaMax::Fixed(v) => {
                kv.set("lambda_strategy", "fixed");
                kv.set("lambda_value", v);
            }
        }
        kv
    }

    /// Reads the keys written by [`to_kv`](Self::to_kv); missing keys fall
    /// back to the defaults.
    pub fn from_kv(kv: &crate::kv::KvMap) -> Result<DecoderConfig> {
        let defaults = DecoderConfig::default();
        let split = |raw: &str| -> Result<Vec<usize>> {
            raw.split(',')
                .map(|tok| {
                    tok.trim()
                        .parse::<usize>()
                        .map_err(|e| CoreError::invalid(format!("bad channel list entry {tok:?}: {e}")))
                })
                .collect()
        };
        let block_channels = match kv.get("block_channels") {
            Some(raw) => split(raw)?,
            None => defaults.block_channels.clone(),
        };
        let head_channels = match kv.get("head_channels") {
            Some(raw) => {
                let list = split(raw)?;
                <[usize; 2]>::try_from(list).map_err(|list| {
                    CoreError::invalid(format!("head_channels needs 2 entries, got {}", list.len()))
                })?
            }
            None => defaults.head_channels,
        };
        let lambda = match kv.get("lambda_strategy").unwrap_or("power") {
            "power" => LambdaMax::PowerIteration {
                tol: kv.get_or("lambda_tol", 1e-6)?,
                max_iters: kv.get_or("lambda_max_iters", 1000)?,
            },
            "fixed" => LambdaMax::Fixed(kv.require("lambda_value")?),
            other => {
                return Err(CoreError::invalid(format!(
                    "unknown lambda_strategy {other:?} (expected power or fixed)"
                )))
            }
        };
        Ok(DecoderConfig {
            latent_dim: kv.get_or("latent_dim", defaults.latent_dim)?,
            cheb_order: kv.get_or("cheb_order", defaults.cheb_order)?,
            block_channels,
            head_channels,
            leaky_slope: kv.get_or("leaky_slope", defaults.leaky_slope)?,
            instance_norm_eps: kv.get_or("instance_norm_eps", defaults.instance_norm_eps)?,
            lambda,
            seed: kv.get_or("seed", defaults.seed)?,
        })
    }

    pub fn validate(&self, hierarchy: &MeshHierarchy) -> Result<()> {
        if self.latent_dim == 0 {
            return Err(CoreError::invalid("latent dimension must be positive"));
        }
        if self.cheb_order == 0 {
            return Err(CoreError::invalid("Chebyshev order must be at least 1"));
        }
        if !(self.leaky_slope > 0.0 && self.leaky_slope < 1.0) {
            return Err(CoreError::invalid("leaky slope must lie in (0, 1)"));
        }
        if self.instance_norm_eps <= 0.0 {
            return Err(CoreError::invalid("instance-norm eps must be positive"));
        }
        if self.block_channels.len() != hierarchy.levels.len() {
            return Err(CoreError::invalid(format!(
                "{} block channels for a {}-level hierarchy",
                self.block_channels.len(),
                hierarchy.levels.len()
            )));
        }
        if self.block_channels.iter().any(|&c| c == 0) || self.head_channels[0] == 0 {
            return Err(CoreError::invalid("channel counts must be positive"));
        }
        if self.head_channels[1] != 3 {
            return Err(CoreError::invalid(
                "the final head channel count must be 3 (coordinates)",
            ));
        }
        Ok(())
    }

    /// Input channels of block `i`: the dense map emits the first block's
    /// channel count, after that each block consumes its predecessor's.
    fn block_f_in(&self, i: usize) -> usize {
        if i == 0 {
            self.block_channels[0]
        } else {
            self.block_channels[i - 1]
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderParams {
    pub input_map: DenseParams,
    /// One block per hierarchy level, coarsest first.
    pub blocks: Vec<ResGcnBlockParams>,
    pub head1: ChebConvParams,
    pub head_norm: InstanceNormParams,
    pub head2: ChebConvParams,
}

#[derive(Debug, Clone)]
pub struct DecoderGradients {
    pub input_map: DenseGrads,
    pub blocks: Vec<ResGcnBlockGrads>,
    pub head1: ChebConvGrads,
    pub head_norm: InstanceNormGrads,
    pub head2: ChebConvGrads,
    pub latent: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DecoderCache {
    blocks: Vec<ResGcnBlockCache>,
    head_in: DenseMatrix,
    head_norm: InstanceNormCache,
    head_pre_act: DenseMatrix,
    head_act: DenseMatrix,
}

fn init_conv(order: usize, f_in: usize, f_out: usize, rng: &mut ChaCha8Rng) -> ChebConvParams {
    let s = (6.0 / (order as f64 * f_in as f64 + f_out as f64)).sqrt();
    ChebConvParams {
        theta: (0..order)
            .map(|_| DenseMatrix::from_fn(f_in, f_out, |_, _| rng.gen_range(-s..s)))
            .collect(),
        bias: vec![0.0; f_out],
    }
}

pub fn init_decoder(config: &DecoderConfig, hierarchy: &MeshHierarchy) -> Result<DecoderParams> {
    config.validate(hierarchy)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let n0 = hierarchy.coarsest().mesh.vertex_count();
    let c1 = config.block_channels[0];
    let out = n0 * c1;
    let s = (6.0 / (config.latent_dim as f64 + out as f64)).sqrt();
    let input_map = DenseParams {
        weights: DenseMatrix::from_fn(config.latent_dim, out, |_, _| rng.gen_range(-s..s)),
        bias: vec![0.0; out],
        vertices: n0,
        channels: c1,
    };

    let mut blocks = Vec::with_capacity(config.block_channels.len());
    for (i, &f_out) in config.block_channels.iter().enumerate() {
        let f_in = config.block_f_in(i);
        let shortcut = if f_in == f_out {
            None
        } else {
            Some(init_conv(1, f_in, f_out, &mut rng))
        };
        blocks.push(ResGcnBlockParams {
            conv1: init_conv(config.cheb_order, f_in, f_out, &mut rng),
            in1: InstanceNormParams::identity(f_out, config.instance_norm_eps)?,
            conv2: init_conv(config.cheb_order, f_out, f_out, &mut rng),
            in2: InstanceNormParams::identity(f_out, config.instance_norm_eps)?,
            shortcut,
        });
    }

    let c_last = *config.block_channels.last().expect("validated non-empty");
    let head1 = init_conv(config.cheb_order, c_last, config.head_channels[0], &mut rng);
    let head_norm = InstanceNormParams::identity(config.head_channels[0], config.instance_norm_eps)?;
    let head2 = init_conv(config.cheb_order, config.head_channels[0], 3, &mut rng);

    Ok(DecoderParams {
        input_map,
        blocks,
        head1,
        head_norm,
        head2,
    })
}

/// Graph operators feeding each block: one scaled Laplacian per block
/// (coarsest level first) and the upsampling matrix applied after it.
pub(crate) fn trunk_operators(
    hierarchy: &MeshHierarchy,
    block_count: usize,
) -> (Vec<&SparseMatrix>, Vec<&SparseMatrix>) {
    let levels = &hierarchy.levels;
    let scaled = (0..block_count)
        .map(|i| &levels[levels.len() - 1 - i].scaled_laplacian)
        .collect();
    let ups = (0..block_count.saturating_sub(1))
        .map(|i| &hierarchy.pairs[block_count - 2 - i].up)
        .collect();
    (scaled, ups)
}

/// Everything past the latent map: residual blocks interleaved with
/// upsampling, then the two-convolution head. Shared between the per-sample
/// decoder and the stacked-batch normalization diagnostic, which feeds in
/// block-diagonal operators.
pub(crate) fn trunk_forward(
    h0: DenseMatrix,
    scaled: &[&SparseMatrix],
    ups: &[&SparseMatrix],
    params: &DecoderParams,
    slope: f64,
) -> Result<(DenseMatrix, DecoderCache)> {
    let block_count = params.blocks.len();
    if scaled.len() != block_count || ups.len() + 1 != block_count {
        return Err(CoreError::shape(format!(
            "{} blocks need {} Laplacians and {} upsamplers, got {} and {}",
            block_count,
            block_count,
            block_count - 1,
            scaled.len(),
            ups.len()
        )));
    }

    let mut h = h0;
    let mut block_caches = Vec::with_capacity(block_count);
    for (i, block) in params.blocks.iter().enumerate() {
        let (next, cache) = resgcn_block_forward(&h, scaled[i], block, slope)?;
        block_caches.push(cache);
        h = next;
        if i + 1 < block_count {
            h = upsample_forward(&h, ups[i])?;
        }
    }

    let finest = scaled[block_count - 1];
    let head_in = h;
    let h1 = cheb_conv_forward(&head_in, finest, &params.head1)?;
    let (head_pre_act, head_norm) = instance_norm_forward(&h1, &params.head_norm)?;
    let head_act = leaky_relu(&head_pre_act, slope)?;
    let out = cheb_conv_forward(&head_act, finest, &params.head2)?;

    Ok((
        out,
        DecoderCache {
            blocks: block_caches,
            head_in,
            head_norm,
            head_pre_act,
            head_act,
        },
    ))
}

pub fn decoder_forward_cached(
    z: &[f64],
    config: &DecoderConfig,
    hierarchy: &MeshHierarchy,
    params: &DecoderParams,
) -> Result<(DenseMatrix, DecoderCache)> {
    config.validate(hierarchy)?;
    let block_count = params.blocks.len();
    if block_count != hierarchy.levels.len() {
        return Err(CoreError::shape("block count does not match hierarchy"));
    }
    let h0 = dense_forward(z, &params.input_map)?;
    let (scaled, ups) = trunk_operators(hierarchy, block_count);
    trunk_forward(h0, &scaled, &ups, params, config.leaky_slope)
}

pub fn decoder_forward(
    z: &[f64],
    config: &DecoderConfig,
    hierarchy: &MeshHierarchy,
    params: &DecoderParams,
) -> Result<DenseMatrix> {
    decoder_forward_cached(z, config, hierarchy, params).map(|(out, _)| out)
}

/// Gradients of the trunk's own parameters, separated from the latent map.
pub(crate) struct TrunkGrads {
    pub blocks: Vec<ResGcnBlockGrads>,
    pub head1: ChebConvGrads,
    pub head_norm: InstanceNormGrads,
    pub head2: ChebConvGrads,
}

pub(crate) fn trunk_backward(
    scaled: &[&SparseMatrix],
    ups: &[&SparseMatrix],
    params: &DecoderParams,
    slope: f64,
    cache: &DecoderCache,
    upstream: &DenseMatrix,
) -> Result<(TrunkGrads, DenseMatrix)> {
    let block_count = params.blocks.len();
    let finest = scaled[block_count - 1];

    let (head2, d_act) = cheb_conv_backward(&cache.head_act, finest, &params.head2, upstream)?;
    let d_pre_act = leaky_relu_backward(&cache.head_pre_act, slope, &d_act)?;
    let (head_norm, d_h1) = instance_norm_backward(&cache.head_norm, &params.head_norm, &d_pre_act)?;
    let (head1, mut d) = cheb_conv_backward(&cache.head_in, finest, &params.head1, &d_h1)?;

    let mut block_grads = Vec::with_capacity(block_count);
    for i in (0..block_count).rev() {
        if i + 1 < block_count {
            d = upsample_backward(&d, ups[i])?;
        }
        let (grads, d_in) =
            resgcn_block_backward(scaled[i], &params.blocks[i], slope, &cache.blocks[i], &d)?;
        block_grads.push(grads);
        d = d_in;
    }
    block_grads.reverse();

    Ok((
        TrunkGrads {
            blocks: block_grads,
            head1,
            head_norm,
            head2,
        },
        d,
    ))
}

pub fn decoder_backward(
    z: &[f64],
    config: &DecoderConfig,
    hierarchy: &MeshHierarchy,
    params: &DecoderParams,
    cache: &DecoderCache,
    upstream: &DenseMatrix,
) -> Result<DecoderGradients> {
    let (scaled, ups) = trunk_operators(hierarchy, params.blocks.len());
    let (trunk, d_h0) = trunk_backward(&scaled, &ups, params, config.leaky_slope, cache, upstream)?;
    let (input_map, latent) = dense_backward(z, &params.input_map, &d_h0)?;

    Ok(DecoderGradients {
        input_map,
        blocks: trunk.blocks,
        head1: trunk.head1,
        head_norm: trunk.head_norm,
        head2: trunk.head2,
        latent,
    })
}

fn visit_conv(prefix: &str, p: &ChebConvParams, f: &mut dyn FnMut(&str, &[f64])) {
    for (k, t) in p.theta.iter().enumerate() {
        f(&format!("{prefix}.theta{k}"), t.as_slice());
    }
    f(&format!("{prefix}.bias"), &p.bias);
}

fn visit_conv_mut(prefix: &str, p: &mut ChebConvParams, f: &mut dyn FnMut(&str, &mut [f64])) {
    for (k, t) in p.theta.iter_mut().enumerate() {
        f(&format!("{prefix}.theta{k}"), t.as_mut_slice());
    }
    f(&format!("{prefix}.bias"), &mut p.bias);
}

fn visit_norm(prefix: &str, p: &InstanceNormParams, f: &mut dyn FnMut(&str, &[f64])) {
    f(&format!("{prefix}.gamma"), &p.gamma);
    f(&format!("{prefix}.beta"), &p.beta);
}

fn visit_norm_mut(prefix: &str, p: &mut InstanceNormParams, f: &mut dyn FnMut(&str, &mut [f64])) {
    f(&format!("{prefix}.gamma"), &mut p.gamma);
    f(&format!("{prefix}.beta"), &mut p.beta);
}

impl DecoderParams {
    /// Visits every parameter tensor as a named flat slice, in a fixed
    /// order shared by gradients, the optimizer, and checkpoints.
    pub fn visit(&self, f: &mut dyn FnMut(&str, &[f64])) {
        f("input_map.weights", self.input_map.weights.as_slice());
        f("input_map.bias", &self.input_map.bias);
        for (i, b) in self.blocks.iter().enumerate() {
            visit_conv(&format!("block{i}.conv1"), &b.conv1, f);
            visit_norm(&format!("block{i}.in1"), &b.in1, f);
            visit_conv(&format!("block{i}.conv2"), &b.conv2, f);
            visit_norm(&format!("block{i}.in2"), &b.in2, f);
            if let Some(sc) = &b.shortcut {
                visit_conv(&format!("block{i}.shortcut"), sc, f);
            }
        }
        visit_conv("head1", &self.head1, f);
        visit_norm("head_norm", &self.head_norm, f);
        visit_conv("head2", &self.head2, f);
    }

    pub fn visit_mut(&mut self, f: &mut dyn FnMut(&str, &mut [f64])) {
        f("input_map.weights", self.input_map.weights.as_mut_slice());
        f("input_map.bias", &mut self.input_map.bias);
        for (i, b) in self.blocks.iter_mut().enumerate() {
            visit_conv_mut(&format!("block{i}.conv1"), &mut b.conv1, f);
            visit_norm_mut(&format!("block{i}.in1"), &mut b.in1, f);
            visit_conv_mut(&format!("block{i}.conv2"), &mut b.conv2, f);
            visit_norm_mut(&format!("block{i}.in2"), &mut b.in2, f);
            if let Some(sc) = &mut b.shortcut {
                visit_conv_mut(&format!("block{i}.shortcut"), sc, f);
            }
        }
        visit_conv_mut("head1", &mut self.head1, f);
        visit_norm_mut("head_norm", &mut self.head_norm, f);
        visit_conv_mut("head2", &mut self.head2, f);
    }

    /// Section names with their lengths, in visit order.
    pub fn sections(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        self.visit(&mut |name, values| out.push((name.to_string(), values.len())));
        out
    }

    pub fn parameter_count(&self) -> usize {
        let mut count = 0;
        self.visit(&mut |_, values| count += values.len());
        count
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        self.visit(&mut |_, values| out.extend_from_slice(values));
        out
    }

    /// Writes a flat vector produced by [`flatten`](Self::flatten) back into
    /// the structured parameters.
    pub fn assign_from_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.parameter_count() {
            return Err(CoreError::shape(format!(
                "flat vector has {} values, parameters hold {}",
                flat.len(),
                self.parameter_count()
            )));
        }
        let mut offset = 0;
        self.visit_mut(&mut |_, values| {
            values.copy_from_slice(&flat[offset..offset + values.len()]);
            offset += values.len();
        });
        Ok(())
    }
}

impl DecoderGradients {
    /// Mirrors [`DecoderParams::visit`] name-for-name; the latent gradient
    /// is not a parameter and is excluded.
    pub fn visit(&self, f: &mut dyn FnMut(&str, &[f64])) {
        f("input_map.weights", self.input_map.weights.as_slice());
        f("input_map.bias", &self.input_map.bias);
        for (i, b) in self.blocks.iter().enumerate() {
            let conv = |prefix: String, g: &ChebConvGrads, f: &mut dyn FnMut(&str, &[f64])| {
                for (k, t) in g.theta.iter().enumerate() {
                    f(&format!("{prefix}.theta{k}"), t.as_slice());
                }
                f(&format!("{prefix}.bias"), &g.bias);
            };
            let norm = |prefix: String, g: &InstanceNormGrads, f: &mut dyn FnMut(&str, &[f64])| {
                f(&format!("{prefix}.gamma"), &g.gamma);
                f(&format!("{prefix}.beta"), &g.beta);
            };
            conv(format!("block{i}.conv1"), &b.conv1, f);
            norm(format!("block{i}.in1"), &b.in1, f);
            conv(format!("block{i}.conv2"), &b.conv2, f);
            norm(format!("block{i}.in2"), &b.in2, f);
            if let Some(sc) = &b.shortcut {
                conv(format!("block{i}.shortcut"), sc, f);
            }
        }
        for (k, t) in self.head1.theta.iter().enumerate() {
            f(&format!("head1.theta{k}"), t.as_slice());
        }
        f("head1.bias", &self.head1.bias);
        f("head_norm.gamma", &self.head_norm.gamma);
        f("head_norm.beta", &self.head_norm.beta);
        for (k, t) in self.head2.theta.iter().enumerate() {
            f(&format!("head2.theta{k}"), t.as_slice());
        }
        f("head2.bias", &self.head2.bias);
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.visit(&mut |_, values| out.extend_from_slice(values));
        out
    }
}
