use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use meshgcn_core::kv::KvMap;
use meshgcn_core::mesh::primitives::icosphere;
use meshgcn_core::model::save_checkpoint_file;
use meshgcn_core::sampling::build_hierarchy;
use meshgcn_core::train::{
    generate_synthetic, train_decoder_observed, write_history_csv, SyntheticSpec, TrainConfig,
};
use meshgcn_core::Result;

use crate::common::{load_config, parse_usize_list, require_path};

/// Train the decoder on a synthetic icosphere dataset.
///
/// The dataset is generated in-process: smooth random displacement fields on
/// an icosphere, combined by latent codes drawn uniformly from [-1, 1]. The
/// run writes `history.csv` (per-epoch losses), `model.ckpt`, and
/// `config.txt`, a snapshot of every effective setting. `--seed S` keys the
/// separate random streams: decoder init uses S, data generation S+1, epoch
/// shuffling S+2 (config keys `data_seed` / `shuffle_seed` override the
/// derived values).
#[derive(Args, Debug)]
pub struct TrainToyArgs {
    /// Output directory, created if missing (required)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Smooth-loss weight [default: 0.1]
    #[arg(long, value_name = "A")]
    alpha: Option<f64>,

    /// Master seed for init, data, and shuffling streams [default: 0]
    #[arg(long, value_name = "S")]
    seed: Option<u64>,

    /// Training epochs [default: 200]
    #[arg(long, value_name = "N")]
    epochs: Option<usize>,

    /// Samples per optimizer step [default: 10]
    #[arg(long, value_name = "N")]
    batch_size: Option<usize>,

    /// Synthetic dataset size [default: 500]
    #[arg(long, value_name = "N")]
    samples: Option<usize>,

    /// Latent code dimension [default: 8]
    #[arg(long, value_name = "D")]
    latent: Option<usize>,

    /// Chebyshev polynomial order of every convolution [default: 3]
    #[arg(long, value_name = "K")]
    cheb_order: Option<usize>,

    /// Residual block output channels, coarsest level first [default: 16,16,16]
    #[arg(long, value_name = "C,C,...")]
    channels: Option<String>,

    /// Head convolution channels; the last must be 3 [default: 16,3]
    #[arg(long, value_name = "C,3")]
    head_channels: Option<String>,

    /// Adam learning rate, halved every 20 epochs [default: 0.001]
    #[arg(long, value_name = "LR")]
    learning_rate: Option<f64>,

    /// Normalization statistics: `instance` or `batch` [default: instance]
    #[arg(long, value_name = "MODE")]
    norm: Option<String>,

    /// Icosphere subdivision level of the finest mesh [default: 3]
    #[arg(long, value_name = "N")]
    subdivisions: Option<u32>,

    /// Comma-separated coarse vertex counts [default: 162,42]
    #[arg(long, value_name = "N,N,...")]
    targets: Option<String>,

    /// RMS vertex displacement of each basis field [default: 0.3]
    #[arg(long, value_name = "A")]
    amplitude: Option<f64>,

    /// Flat `key = value` config file; flags override its entries [default: none]
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

/// Desk-scale preset: a 642/162/42-vertex hierarchy with a small decoder.
fn toy_baseline() -> KvMap {
    let mut kv = KvMap::new();
    kv.set("latent_dim", 8);
    kv.set("cheb_order", 3);
    kv.set("block_channels", "16,16,16");
    kv.set("head_channels", "16,3");
    kv.set("seed", 0);
    kv.set("alpha", 0.1);
    kv.set("learning_rate", 1e-3);
    kv.set("epochs", 200);
    kv.set("decay_epochs", 50);
    kv.set("batch_size", 10);
    kv.set("norm_mode", "instance");
    kv.set("subdivisions", 3);
    kv.set("targets", "162,42");
    kv.set("boundary_weight", 1000.0);
    kv.set("sample_count", 500);
    kv.set("amplitude", 0.3);
    kv.set("smoothing_rounds", 400);
    kv
}

pub fn run(args: TrainToyArgs) -> Result<()> {
    let file = load_config(args.config.as_deref())?;
    let mut kv = toy_baseline();
    for key in file.keys() {
        kv.set(key, file.get(key).expect("listed key"));
    }
    if let Some(v) = args.alpha {
        kv.set("alpha", v);
    }
    if let Some(v) = args.seed {
        kv.set("seed", v);
    }
    if let Some(v) = args.epochs {
        kv.set("epochs", v);
    }
    if let Some(v) = args.batch_size {
        kv.set("batch_size", v);
    }
    if let Some(v) = args.samples {
        kv.set("sample_count", v);
    }
    if let Some(v) = args.latent {
        kv.set("latent_dim", v);
    }
    if let Some(v) = args.cheb_order {
        kv.set("cheb_order", v);
    }
    if let Some(v) = args.channels {
        kv.set("block_channels", v);
    }
    if let Some(v) = args.head_channels {
        kv.set("head_channels", v);
    }
    if let Some(v) = args.learning_rate {
        kv.set("learning_rate", v);
    }
    if let Some(v) = args.norm {
        kv.set("norm_mode", v);
    }
    if let Some(v) = args.subdivisions {
        kv.set("subdivisions", v);
    }
    if let Some(v) = args.targets {
        kv.set("targets", v);
    }
    if let Some(v) = args.amplitude {
        kv.set("amplitude", v);
    }

    let master: u64 = kv.require("seed")?;
    if !kv.contains("data_seed") {
        kv.set("data_seed", master.wrapping_add(1));
    }
    if !kv.contains("shuffle_seed") {
        kv.set("shuffle_seed", master.wrapping_add(2));
    }

    let out = require_path(args.out, &kv, "out")?;
    let train = TrainConfig::from_kv(&kv)?;
    let spec = SyntheticSpec {
        latent_dim: train.decoder.latent_dim,
        sample_count: kv.require("sample_count")?,
        seed: kv.require("data_seed")?,
        amplitude: kv.require("amplitude")?,
        smoothing_rounds: kv.require("smoothing_rounds")?,
    };
    let subdivisions: u32 = kv.require("subdivisions")?;
    let targets = parse_usize_list(kv.get("targets").expect("baseline key"))?;
    let boundary_weight: f64 = kv.require("boundary_weight")?;

    let mesh = icosphere(subdivisions);
    let hierarchy = build_hierarchy(&mesh, &targets, boundary_weight, train.decoder.lambda)?;
    let dataset = generate_synthetic(&hierarchy.levels[0].mesh, &spec)?;

    fs::create_dir_all(&out)?;
    let mut snapshot = train.to_kv();
    for key in ["subdivisions", "targets", "boundary_weight", "sample_count", "data_seed", "amplitude", "smoothing_rounds"] {
        snapshot.set(key, kv.get(key).expect("resolved above"));
    }
    fs::write(out.join("config.txt"), snapshot.to_text())?;

    println!(
        "training on {} samples, hierarchy {:?}, {} epochs",
        dataset.samples.len(),
        hierarchy.level_sizes(),
        train.epochs
    );
    let outcome = train_decoder_observed(&train, &hierarchy, &dataset.samples, &mut |s| {
        println!(
            "epoch {}/{}: l1 {:.6} smooth {:.6} total {:.6} lr {:.6}",
            s.epoch, train.epochs, s.l1, s.smooth, s.total, s.learning_rate
        );
    })?;

    let mut history = BufWriter::new(fs::File::create(out.join("history.csv"))?);
    write_history_csv(&mut history, &outcome.history)?;
    save_checkpoint_file(&outcome.params, &train.decoder, &hierarchy, &out.join("model.ckpt"))?;

    if let (Some(first), Some(last)) = (outcome.history.first(), outcome.history.last()) {
        println!("l1: {:.6} -> {:.6}", first.l1, last.l1);
    }
    Ok(())
}
