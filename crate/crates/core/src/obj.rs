//! Wavefront OBJ reading and writing.
//!
//! Only geometry is handled: `v x y z` vertex records and `f i j k [l ...]`
//! face records with 1-based indices. Faces with more than three corners are
//! fan-triangulated from the first corner. Texture/normal suffixes on face
//! indices (`i/t/n`) are accepted and stripped; every other record type is
//! ignored. Vertices are written with shortest round-trip float formatting,
//! so a save/load cycle reproduces coordinates exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{CoreError, Result};
use crate::mesh::Mesh;

pub fn load_mesh<R: BufRead>(reader: R) -> Result<Mesh> {
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut raw_faces: Vec<(usize, Vec<usize>)> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for (k, c) in coords.iter_mut().enumerate() {
                    let tok = tokens.next().ok_or_else(|| {
                        CoreError::parse(lineno, format!("vertex needs 3 coordinates, got {k}"))
                    })?;
                    *c = tok.parse().map_err(|e| {
                        CoreError::parse(lineno, format!("bad coordinate {tok:?}: {e}"))
                    })?;
                }
                // A fourth (weight) component is legal OBJ; ignore it.
                vertices.push(coords);
            }
            Some("f") => {
                let mut corners = Vec::new();
                for tok in tokens {
                    let index_part = tok.split('/').next().unwrap_or(tok);
                    let raw: i64 = index_part.parse().map_err(|e| {
                        CoreError::parse(lineno, format!("bad face index {tok:?}: {e}"))
                    })?;
                    if raw < 0 {
                        return Err(CoreError::parse(
                            lineno,
                            format!("negative face index {raw} not supported"),
                        ));
                    }
                    if raw == 0 {
                        return Err(CoreError::parse(lineno, "face index 0 (indices are 1-based)"));
                    }
                    corners.push((raw - 1) as usize);
                }
                if corners.len() < 3 {
                    return Err(CoreError::parse(
                        lineno,
                        format!("face needs at least 3 indices, got {}", corners.len()),
                    ));
                }
                raw_faces.push((lineno, corners));
            }
            _ => {} // comments, normals, texture coords, groups, ...
        }
    }

    let mut faces = Vec::new();
    for (lineno, corners) in raw_faces {
        for &c in &corners {
            if c >= vertices.len() {
                return Err(CoreError::parse(
                    lineno,
                    format!(
                        "face index {} out of range (file defines {} vertices)",
                        c + 1,
                        vertices.len()
                    ),
                ));
            }
        }
        for k in 1..corners.len() - 1 {
            faces.push([corners[0], corners[k], corners[k + 1]]);
        }
    }

    Mesh::new(vertices, faces)
}

pub fn save_mesh<W: Write>(mesh: &Mesh, writer: &mut W) -> Result<()> {
    for v in mesh.vertices() {
        writeln!(writer, "v {} {} {}", v[0], v[1], v[2])?;
    }
    for f in mesh.faces() {
        writeln!(writer, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

pub fn load_mesh_file(path: &Path) -> Result<Mesh> {
    let file = File::open(path)?;
    load_mesh(BufReader::new(file))
}

pub fn save_mesh_file(mesh: &Mesh, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    save_mesh(mesh, &mut w)?;
    w.flush()?;
    Ok(())
}
