//! Directory persistence for mesh hierarchies.
//!
//! Layout under the target directory:
//!
//! ```text
//! manifest.txt      levels, per-level vertex counts and lambda_max
//! level_0.obj       finest mesh
//! level_1.obj       ...
//! down_0.txt        sparse sampling operators between levels 0 and 1
//! up_0.txt
//! kept_0.txt        kept fine indices, one per line
//! ```
//!
//! Laplacians are rebuilt from the meshes on load; `lambda_max` is stored in
//! the manifest with shortest round-trip formatting, so the reconstructed
//! operators and the hierarchy fingerprint are bit-identical to the saved
//! ones.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{CoreError, Result};
use crate::kv::KvMap;
use crate::obj::{load_mesh_file, save_mesh_file};
use crate::sparse::SparseMatrix;

use super::hierarchy::{HierarchyLevel, MeshHierarchy, SamplingPair};

pub fn save_hierarchy(hierarchy: &MeshHierarchy, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut manifest = KvMap::new();
    manifest.set("levels", hierarchy.levels.len());
    for (k, level) in hierarchy.levels.iter().enumerate() {
        manifest.set(&format!("vertices_{k}"), level.mesh.vertex_count());
        manifest.set(&format!("lambda_max_{k}"), level.lambda_max);
        save_mesh_file(&level.mesh, &dir.join(format!("level_{k}.obj")))?;
    }
    fs::write(dir.join("manifest.txt"), manifest.to_text())?;

    for (k, pair) in hierarchy.pairs.iter().enumerate() {
        pair.down.write_text_file(&dir.join(format!("down_{k}.txt")))?;
        pair.up.write_text_file(&dir.join(format!("up_{k}.txt")))?;
        let mut kept = fs::File::create(dir.join(format!("kept_{k}.txt")))?;
        for &i in &pair.kept {
            writeln!(kept, "{i}")?;
        }
    }
    Ok(())
}

pub fn load_hierarchy(dir: &Path) -> Result<MeshHierarchy> {
    let manifest = KvMap::parse_file(&dir.join("manifest.txt"))?;
    let level_count: usize = manifest.require("levels")?;
    if level_count == 0 {
        return Err(CoreError::invalid("manifest declares zero levels"));
    }

    let mut levels = Vec::with_capacity(level_count);
    for k in 0..level_count {
        let mesh = load_mesh_file(&dir.join(format!("level_{k}.obj")))?;
        let declared: usize = manifest.require(&format!("vertices_{k}"))?;
        if mesh.vertex_count() != declared {
            return Err(CoreError::invalid(format!(
                "level {k} has {} vertices but the manifest declares {declared}",
                mesh.vertex_count()
            )));
        }
        let lambda_max: f64 = manifest.require(&format!("lambda_max_{k}"))?;
        levels.push(HierarchyLevel::from_mesh_with_lambda(mesh, lambda_max)?);
    }

    let mut pairs = Vec::with_capacity(level_count - 1);
    for k in 0..level_count - 1 {
        let down = SparseMatrix::read_text_file(&dir.join(format!("down_{k}.txt")))?;
        let up = SparseMatrix::read_text_file(&dir.join(format!("up_{k}.txt")))?;
        let kept = read_indices(&dir.join(format!("kept_{k}.txt")))?;
        let fine = levels[k].mesh.vertex_count();
        let coarse = levels[k + 1].mesh.vertex_count();
        if down.rows() != coarse || down.cols() != fine || up.rows() != fine || up.cols() != coarse
        {
            return Err(CoreError::shape(format!(
                "sampling pair {k} does not match level sizes {fine} and {coarse}"
            )));
        }
        if kept.len() != coarse {
            return Err(CoreError::invalid(format!(
                "pair {k} lists {} kept vertices for a level of {coarse}",
                kept.len()
            )));
        }
        pairs.push(SamplingPair { down, up, kept });
    }

    Ok(MeshHierarchy { levels, pairs })
}

fn read_indices(path: &Path) -> Result<Vec<usize>> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let value = trimmed.parse::<usize>().map_err(|_| CoreError::Parse {
            line: number + 1,
            message: format!("expected a vertex index, found {trimmed:?}"),
        })?;
        out.push(value);
    }
    Ok(out)
}
