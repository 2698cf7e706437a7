//! Mini-batch training of the decoder on latent/target pairs.
//!
//! Gradients are averaged over each batch and applied with Adam under a
//! step-halving schedule. Per-sample work is farmed out to the thread pool
//! but accumulated in sample order, so histories and final parameters are
//! bit-identical for a fixed seed no matter how many threads run.

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};
use crate::gcn::{dense_backward, dense_forward, DenseGrads};
use crate::graph::{adjacency, unnormalized_laplacian};
use crate::kv::KvMap;
use crate::model::{
    decoder_backward, decoder_forward_cached, init_decoder, trunk_backward, trunk_forward,
    trunk_operators, DecoderConfig, DecoderGradients, DecoderParams,
};
use crate::sampling::MeshHierarchy;
use crate::sparse::SparseMatrix;
use crate::train::adam::{adam_step, AdamConfig, AdamState};
use crate::train::loss::{total_loss, LossBreakdown, LossConfig};
use crate::train::synthetic::Sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::io::Write;

/// How normalization layers compute their statistics during training.
///
/// `Instance` is the production path: statistics per sample, per channel.
/// `BatchStats` stacks the whole batch into one block-diagonal graph so the
/// same layers see batch-wide statistics — a diagnostic for comparing the
/// two schemes with identical parameters and data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormMode {
    #[default]
    Instance,
    BatchStats,
}

impl NormMode {
    pub fn parse(s: &str) -> Result<NormMode> {
        match s {
            "instance" => Ok(NormMode::Instance),
            "batch" => Ok(NormMode::BatchStats),
            other => Err(CoreError::invalid(format!(
                "unknown normalization mode {other:?}, expected instance or batch"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NormMode::Instance => "instance",
            NormMode::BatchStats => "batch",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub decoder: DecoderConfig,
    pub loss: LossConfig,
    pub optimizer: AdamConfig,
    pub epochs: usize,
    pub batch_size: usize,
    pub shuffle_seed: u64,
    pub norm_mode: NormMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            decoder: DecoderConfig::default(),
            loss: LossConfig::default(),
            optimizer: AdamConfig::default(),
            epochs: 200,
            batch_size: 50,
            shuffle_seed: 1,
            norm_mode: NormMode::Instance,
        }
    }
}

impl TrainConfig {
    pub fn to_kv(&self) -> KvMap {
        let mut kv = self.decoder.to_kv();
        kv.set("alpha", self.loss.alpha);
        kv.set("learning_rate", self.optimizer.learning_rate);
        kv.set("beta1", self.optimizer.beta1);
        kv.set("beta2", self.optimizer.beta2);
        kv.set("adam_eps", self.optimizer.eps);
        kv.set("decay_epochs", self.optimizer.decay_epochs);
        kv.set("epochs", self.epochs);
        kv.set("batch_size", self.batch_size);
        kv.set("shuffle_seed", self.shuffle_seed);
        kv.set("norm_mode", self.norm_mode.name());
        kv
    }

    pub fn from_kv(kv: &KvMap) -> Result<TrainConfig> {
        let defaults = TrainConfig::default();
        Ok(TrainConfig {
            decoder: DecoderConfig::from_kv(kv)?,
            loss: LossConfig {
                alpha: kv.get_or("alpha", defaults.loss.alpha)?,
            },
            optimizer: AdamConfig {
                learning_rate: kv.get_or("learning_rate", defaults.optimizer.learning_rate)?,
                beta1: kv.get_or("beta1", defaults.optimizer.beta1)?,
                beta2: kv.get_or("beta2", defaults.optimizer.beta2)?,
                eps: kv.get_or("adam_eps", defaults.optimizer.eps)?,
                decay_epochs: kv.get_or("decay_epochs", defaults.optimizer.decay_epochs)?,
            },
            epochs: kv.get_or("epochs", defaults.epochs)?,
            batch_size: kv.get_or("batch_size", defaults.batch_size)?,
            shuffle_seed: kv.get_or("shuffle_seed", defaults.shuffle_seed)?,
            norm_mode: match kv.get("norm_mode") {
                Some(s) => NormMode::parse(s)?,
                None => defaults.norm_mode,
            },
        })
    }

    fn validate(&self, samples: &[Sample], hierarchy: &MeshHierarchy) -> Result<()> {
        self.loss.validate()?;
        self.optimizer.validate()?;
        if self.epochs == 0 {
            return Err(CoreError::invalid("training needs at least one epoch"));
        }
        if self.batch_size == 0 {
            return Err(CoreError::invalid("batch size must be at least 1"));
        }
        if samples.is_empty() {
            return Err(CoreError::invalid("training needs at least one sample"));
        }
        let n = hierarchy.levels[0].mesh.vertex_count();
        for (i, s) in samples.iter().enumerate() {
            if s.z.len() != self.decoder.latent_dim {
                return Err(CoreError::shape(format!(
                    "sample {i} has a {}-dimensional latent code, model expects {}",
                    s.z.len(),
                    self.decoder.latent_dim
                )));
            }
            if s.target.rows() != n || s.target.cols() != 3 {
                return Err(CoreError::shape(format!(
                    "sample {i} target is {}x{}, expected {n}x3",
                    s.target.rows(),
                    s.target.cols()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    /// One-based epoch index as written to the history.
    pub epoch: usize,
    pub l1: f64,
    pub smooth: f64,
    pub total: f64,
    pub learning_rate: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: DecoderParams,
    pub history: Vec<EpochStats>,
}

/// Per-block operators replicated along the diagonal, one graph per sample.
struct StackedOps {
    scaled: Vec<SparseMatrix>,
    ups: Vec<SparseMatrix>,
    copies: usize,
}

impl StackedOps {
    fn build(hierarchy: &MeshHierarchy, block_count: usize, copies: usize) -> StackedOps {
        let (scaled, ups) = trunk_operators(hierarchy, block_count);
        StackedOps {
            scaled: scaled.iter().map(|m| m.block_diagonal(copies)).collect(),
            ups: ups.iter().map(|m| m.block_diagonal(copies)).collect(),
            copies,
        }
    }
}

/// Forward/backward over one batch with per-sample normalization; returns
/// batch-mean gradients and each sample's loss.
fn per_sample_batch(
    config: &TrainConfig,
    hierarchy: &MeshHierarchy,
    params: &DecoderParams,
    lap: &SparseMatrix,
    batch: &[&Sample],
) -> Result<(Vec<f64>, Vec<LossBreakdown>)> {
    let results: Vec<(Vec<f64>, LossBreakdown)> = batch
        .par_iter()
        .map(|s| {
            let (pred, cache) = decoder_forward_cached(&s.z, &config.decoder, hierarchy, params)?;
            let (breakdown, grad) = total_loss(&pred, &s.target, lap, &config.loss)?;
            let grads = decoder_backward(&s.z, &config.decoder, hierarchy, params, &cache, &grad)?;
            Ok((grads.flatten(), breakdown))
        })
        .collect::<Result<_>>()?;

    let scale = 1.0 / batch.len() as f64;
    let mut grads = vec![0.0; results[0].0.len()];
    let mut breakdowns = Vec::with_capacity(results.len());
    for (flat, breakdown) in results {
        for (acc, g) in grads.iter_mut().zip(&flat) {
            *acc += g;
        }
        breakdowns.push(breakdown);
    }
    for g in &mut grads {
        *g *= scale;
    }
    Ok((grads, breakdowns))
}

/// Forward/backward over one batch stacked into a single block-diagonal
/// graph, so normalization statistics pool across the batch.
fn stacked_batch(
    config: &TrainConfig,
    hierarchy: &MeshHierarchy,
    params: &DecoderParams,
    lap: &SparseMatrix,
    batch: &[&Sample],
    ops: &StackedOps,
) -> Result<(Vec<f64>, Vec<LossBreakdown>)> {
    let n0 = hierarchy.coarsest().mesh.vertex_count();
    let n = hierarchy.levels[0].mesh.vertex_count();
    let slope = config.decoder.leaky_slope;
    let scale = 1.0 / batch.len() as f64;

    let h0s: Vec<DenseMatrix> = batch
        .iter()
        .map(|s| dense_forward(&s.z, &params.input_map))
        .collect::<Result<_>>()?;
    let h0 = DenseMatrix::vstack(&h0s.iter().collect::<Vec<_>>())?;

    let scaled: Vec<&SparseMatrix> = ops.scaled.iter().collect();
    let ups: Vec<&SparseMatrix> = ops.ups.iter().collect();
    let (pred, cache) = trunk_forward(h0, &scaled, &ups, params, slope)?;

    let mut parts = Vec::with_capacity(batch.len());
    let mut breakdowns = Vec::with_capacity(batch.len());
    for (i, s) in batch.iter().enumerate() {
        let sample_pred = pred.row_block(i * n, n);
        let (breakdown, mut grad) = total_loss(&sample_pred, &s.target, lap, &config.loss)?;
        grad.scale_in_place(scale);
        parts.push(grad);
        breakdowns.push(breakdown);
    }
    let upstream = DenseMatrix::vstack(&parts.iter().collect::<Vec<_>>())?;
    let (trunk, d_h0) = trunk_backward(&scaled, &ups, params, slope, &cache, &upstream)?;

    let mut weights = DenseMatrix::zeros(
        params.input_map.weights.rows(),
        params.input_map.weights.cols(),
    );
    let mut bias = vec![0.0; params.input_map.bias.len()];
    for (i, s) in batch.iter().enumerate() {
        let (dg, _) = dense_backward(&s.z, &params.input_map, &d_h0.row_block(i * n0, n0))?;
        weights.add_scaled(&dg.weights, 1.0)?;
        for (acc, v) in bias.iter_mut().zip(&dg.bias) {
            *acc += v;
        }
    }

    let grads = DecoderGradients {
        input_map: DenseGrads { weights, bias },
        blocks: trunk.blocks,
        head1: trunk.head1,
        head_norm: trunk.head_norm,
        head2: trunk.head2,
        latent: Vec::new(),
    };
    Ok((grads.flatten(), breakdowns))
}

pub fn train_decoder(
    config: &TrainConfig,
    hierarchy: &MeshHierarchy,
    samples: &[Sample],
) -> Result<TrainOutcome> {
    train_decoder_observed(config, hierarchy, samples, &mut |_| {})
}

/// Like [`train_decoder`], invoking `observer` after every epoch.
pub fn train_decoder_observed(
    config: &TrainConfig,
    hierarchy: &MeshHierarchy,
    samples: &[Sample],
    observer: &mut dyn FnMut(&EpochStats),
) -> Result<TrainOutcome> {
    config.validate(samples, hierarchy)?;
    let lap = unnormalized_laplacian(&adjacency(&hierarchy.levels[0].mesh))?;

    let mut params = init_decoder(&config.decoder, hierarchy)?;
    let sections = params.sections();
    let mut flat = params.flatten();
    let mut state = AdamState::new(flat.len());
    let mut rng = ChaCha8Rng::seed_from_u64(config.shuffle_seed);
    let mut indices: Vec<usize> = (0..samples.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    let mut stacked: Option<StackedOps> = None;

    for epoch in 0..config.epochs {
        let lr = config.optimizer.learning_rate_at(epoch);
        indices.shuffle(&mut rng);
        let mut sums = LossBreakdown {
            l1: 0.0,
            smooth: 0.0,
            total: 0.0,
        };

        for (batch_idx, chunk) in indices.chunks(config.batch_size).enumerate() {
            let batch: Vec<&Sample> = chunk.iter().map(|&i| &samples[i]).collect();
            let (grads, breakdowns) = match config.norm_mode {
                NormMode::Instance => per_sample_batch(config, hierarchy, &params, &lap, &batch)?,
                NormMode::BatchStats => {
                    if stacked.as_ref().map(|s| s.copies) != Some(batch.len()) {
                        stacked = Some(StackedOps::build(
                            hierarchy,
                            params.blocks.len(),
                            batch.len(),
                        ));
                    }
                    let ops = stacked.as_ref().expect("just built");
                    stacked_batch(config, hierarchy, &params, &lap, &batch, ops)?
                }
            };

            for b in &breakdowns {
                if !b.total.is_finite() {
                    return Err(CoreError::numerical(format!(
                        "training diverged: non-finite loss in epoch {} batch {batch_idx}",
                        epoch + 1
                    )));
                }
                sums.l1 += b.l1;
                sums.smooth += b.smooth;
                sums.total += b.total;
            }

            adam_step(&mut flat, &grads, &mut state, &config.optimizer, lr, &sections).map_err(
                |e| {
                    CoreError::numerical(format!("epoch {} batch {batch_idx}: {e}", epoch + 1))
                },
            )?;
            params.assign_from_flat(&flat)?;
        }

        let count = samples.len() as f64;
        let stats = EpochStats {
            epoch: epoch + 1,
            l1: sums.l1 / count,
            smooth: sums.smooth / count,
            total: sums.total / count,
            learning_rate: lr,
        };
        observer(&stats);
        history.push(stats);
    }

    Ok(TrainOutcome { params, history })
}

/// Mean losses of a fixed parameter set over a sample collection.
pub fn evaluate_mean_losses(
    decoder: &DecoderConfig,
    hierarchy: &MeshHierarchy,
    params: &DecoderParams,
    samples: &[Sample],
    loss: &LossConfig,
) -> Result<LossBreakdown> {
    if samples.is_empty() {
        return Err(CoreError::invalid("evaluation needs at least one sample"));
    }
    let lap = unnormalized_laplacian(&adjacency(&hierarchy.levels[0].mesh))?;
    let parts: Vec<LossBreakdown> = samples
        .par_iter()
        .map(|s| {
            let (pred, _) = decoder_forward_cached(&s.z, decoder, hierarchy, params)?;
            Ok(total_loss(&pred, &s.target, &lap, loss)?.0)
        })
        .collect::<Result<_>>()?;
    let count = parts.len() as f64;
    let mut mean = LossBreakdown {
        l1: 0.0,
        smooth: 0.0,
        total: 0.0,
    };
    for p in parts {
        mean.l1 += p.l1 / count;
        mean.smooth += p.smooth / count;
        mean.total += p.total / count;
    }
    Ok(mean)
}

/// Writes the history as `epoch,l1,smooth,total,lr` rows under a header.
pub fn write_history_csv<W: Write>(w: &mut W, history: &[EpochStats]) -> Result<()> {
    writeln!(w, "epoch,l1,smooth,total,lr")?;
    for s in history {
        writeln!(
            w,
            "{},{},{},{},{}",
            s.epoch, s.l1, s.smooth, s.total, s.learning_rate
        )?;
    }
    Ok(())
}
