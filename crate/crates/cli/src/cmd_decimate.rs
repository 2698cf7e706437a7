use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Args;
use meshgcn_core::obj::{load_mesh_file, save_mesh_file};
use meshgcn_core::sampling::{decimate, downsampling_matrix, upsampling_matrix};
use meshgcn_core::{CoreError, Result};

use crate::common::{load_config, require, require_path, resolve_or};

const DEFAULT_BOUNDARY_WEIGHT: f64 = 1000.0;

/// Decimate a mesh and emit the matching sampling operators.
#[derive(Args, Debug)]
pub struct DecimateArgs {
    /// Input mesh in OBJ format (required here or as config key `in`)
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,

    /// Coarse vertex count to stop at; must be below the input count (required)
    #[arg(long, value_name = "N")]
    target: Option<usize>,

    /// Quadric penalty pinning boundary edges [default: 1000]
    #[arg(long, value_name = "W")]
    boundary_weight: Option<f64>,

    /// Output directory, created if missing (required)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Flat `key = value` config file; flags override its entries [default: none]
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

pub fn run(args: DecimateArgs) -> Result<()> {
    let kv = load_config(args.config.as_deref())?;
    let input = require_path(args.input, &kv, "in")?;
    let target = require(args.target, &kv, "target")?;
    let boundary_weight = resolve_or(args.boundary_weight, &kv, "boundary_weight", DEFAULT_BOUNDARY_WEIGHT)?;
    let out = require_path(args.out, &kv, "out")?;

    let mesh = load_mesh_file(&input)?;
    if target >= mesh.vertex_count() {
        return Err(CoreError::invalid(format!(
            "target {target} is not below the input vertex count {}",
            mesh.vertex_count()
        )));
    }

    let dec = decimate(&mesh, target, boundary_weight)?;
    let up = upsampling_matrix(&mesh, &dec.mesh, &dec.kept)?;
    let down = downsampling_matrix(mesh.vertex_count(), &dec.kept)?;

    fs::create_dir_all(&out)?;
    save_mesh_file(&dec.mesh, &out.join("mesh.obj"))?;
    let mut kept = std::io::BufWriter::new(fs::File::create(out.join("kept.txt"))?);
    for &i in &dec.kept {
        writeln!(kept, "{i}")?;
    }
    kept.flush()?;
    down.write_text_file(&out.join("down.txt"))?;
    up.write_text_file(&out.join("up.txt"))?;

    println!(
        "vertices: {} -> {} (target {target}{}), faces: {} -> {}",
        mesh.vertex_count(),
        dec.mesh.vertex_count(),
        if dec.reached_target { "" } else { ", stalled early" },
        mesh.face_count(),
        dec.mesh.face_count(),
    );
    Ok(())
}
