use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use clap::Args;
use meshgcn_core::model::{decoder_forward, load_checkpoint_file};
use meshgcn_core::obj::save_mesh_file;
use meshgcn_core::sampling::load_hierarchy;
use meshgcn_core::{CoreError, Result};

use crate::common::{load_config, require_path};

/// Decode latent codes into meshes with a trained checkpoint.
///
/// The checkpoint stores the fingerprint of the hierarchy it was trained on
/// and refuses to load against any other.
#[derive(Args, Debug)]
pub struct InferArgs {
    /// Checkpoint written by train-toy (required here or as config key `model`)
    #[arg(long, value_name = "PATH")]
    model: Option<PathBuf>,

    /// Hierarchy directory written by the hierarchy subcommand (required)
    #[arg(long, value_name = "DIR")]
    hierarchy: Option<PathBuf>,

    /// Latent codes, one whitespace- or comma-separated row per line (required)
    #[arg(long, value_name = "PATH")]
    latent: Option<PathBuf>,

    /// Output directory, created if missing (required)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Flat `key = value` config file; flags override its entries [default: none]
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

fn read_latents(path: &Path) -> Result<Vec<Vec<f64>>> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut rows = Vec::new();
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let row: Vec<f64> = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|e| CoreError::parse(number + 1, format!("bad latent entry {tok:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CoreError::invalid("latent file holds no codes"));
    }
    Ok(rows)
}

pub fn run(args: InferArgs) -> Result<()> {
    let kv = load_config(args.config.as_deref())?;
    let model = require_path(args.model, &kv, "model")?;
    let hierarchy_dir = require_path(args.hierarchy, &kv, "hierarchy")?;
    let latent = require_path(args.latent, &kv, "latent")?;
    let out = require_path(args.out, &kv, "out")?;

    let hierarchy = load_hierarchy(&hierarchy_dir)?;
    let (config, params) = load_checkpoint_file(&model, &hierarchy)?;
    let codes = read_latents(&latent)?;
    for (i, z) in codes.iter().enumerate() {
        if z.len() != config.latent_dim {
            return Err(CoreError::invalid(format!(
                "latent row {i} has {} entries, the decoder expects {}",
                z.len(),
                config.latent_dim
            )));
        }
    }

    fs::create_dir_all(&out)?;
    let finest = &hierarchy.levels[0].mesh;
    for (i, z) in codes.iter().enumerate() {
        let coords = decoder_forward(z, &config, &hierarchy, &params)?;
        let mesh = finest.with_coords(&coords)?;
        save_mesh_file(&mesh, &out.join(format!("pred_{i}.obj")))?;
    }
    println!(
        "wrote {} meshes with {} vertices each",
        codes.len(),
        finest.vertex_count()
    );
    Ok(())
}
