use std::path::PathBuf;

use clap::Args;
use meshgcn_core::obj::load_mesh_file;
use meshgcn_core::sampling::{build_hierarchy, save_hierarchy};
use meshgcn_core::Result;

use crate::common::{load_config, parse_lambda, parse_usize_list, require, require_path, resolve_or};

const DEFAULT_BOUNDARY_WEIGHT: f64 = 1000.0;

/// Build a multi-level decimation hierarchy and save it as a directory.
///
/// The output directory holds `manifest.txt` (level count, per-level vertex
/// counts and lambda_max), `level_k.obj` meshes, `down_k.txt` / `up_k.txt` /
/// `kept_k.txt` sampling operators, and `laplacian_k.txt` with each level's
/// scaled Laplacian.
#[derive(Args, Debug)]
pub struct HierarchyArgs {
    /// Input mesh in OBJ format (required here or as config key `in`)
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,

    /// Comma-separated coarse vertex counts, strictly decreasing (required)
    #[arg(long, value_name = "N,N,...")]
    targets: Option<String>,

    /// Quadric penalty pinning boundary edges [default: 1000]
    #[arg(long, value_name = "W")]
    boundary_weight: Option<f64>,

    /// Largest-eigenvalue strategy: `power` or `fixed:<value>` [default: power]
    #[arg(long, value_name = "STRATEGY")]
    lambda: Option<String>,

    /// Output directory, created if missing (required)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Flat `key = value` config file; flags override its entries [default: none]
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

pub fn run(args: HierarchyArgs) -> Result<()> {
    let kv = load_config(args.config.as_deref())?;
    let input = require_path(args.input, &kv, "in")?;
    let targets = parse_usize_list(&require(args.targets, &kv, "targets")?)?;
    let boundary_weight = resolve_or(args.boundary_weight, &kv, "boundary_weight", DEFAULT_BOUNDARY_WEIGHT)?;
    let lambda = parse_lambda(&resolve_or(args.lambda, &kv, "lambda", "power".to_string())?)?;
    let out = require_path(args.out, &kv, "out")?;

    let mesh = load_mesh_file(&input)?;
    let hierarchy = build_hierarchy(&mesh, &targets, boundary_weight, lambda)?;
    save_hierarchy(&hierarchy, &out)?;
    for (k, level) in hierarchy.levels.iter().enumerate() {
        level
            .scaled_laplacian
            .write_text_file(&out.join(format!("laplacian_{k}.txt")))?;
        println!(
            "level {k}: {} vertices, lambda_max {}",
            level.mesh.vertex_count(),
            level.lambda_max
        );
    }
    println!("fingerprint: {:016x}", hierarchy.fingerprint());
    Ok(())
}
