//! Sampling matrices between a fine mesh and its decimated coarse mesh.
//!
//! Downsampling is binary row selection: coarse vertex `c` reads fine vertex
//! `kept[c]`. Upsampling is its interpolating counterpart: a kept fine vertex
//! maps one-to-one from its coarse copy, a removed fine vertex is projected
//! onto the nearest coarse triangle (lowest face index on exact ties) and
//! re-expressed by the barycentric weights of the projection, so every row
//! sums to 1.

use crate::error::{CoreError, Result};
use crate::mesh::Mesh;
use crate::sparse::SparseMatrix;
use crate::spatial::FaceGrid;

/// Binary `n x N` selection matrix with one 1 per row at `kept[c]`.
pub fn downsampling_matrix(fine_vertex_count: usize, kept: &[usize]) -> Result<SparseMatrix> {
    validate_kept(fine_vertex_count, kept)?;
    let triplets: Vec<_> = kept.iter().enumerate().map(|(c, &v)| (c, v, 1.0)).collect();
    SparseMatrix::from_triplets(kept.len(), fine_vertex_count, &triplets)
}

/// Interpolating `N x n` matrix mapping coarse per-vertex values back to the
/// fine mesh.
///
/// Rows of kept vertices are one-hot; rows of removed vertices hold the
/// barycentric weights of the vertex's projection onto the nearest coarse
/// face (weights that are exactly zero are not stored). Requires coarse
/// faces once any vertex was removed.
pub fn upsampling_matrix(fine: &Mesh, coarse: &Mesh, kept: &[usize]) -> Result<SparseMatrix> {
    validate_kept(fine.vertex_count(), kept)?;
    if kept.len() != coarse.vertex_count() {
        return Err(CoreError::invalid(format!(
            "kept list has {} entries but coarse mesh has {} vertices",
            kept.len(),
            coarse.vertex_count()
        )));
    }

    let n_fine = fine.vertex_count();
    let n_coarse = coarse.vertex_count();
    let mut coarse_of = vec![usize::MAX; n_fine];
    for (c, &v) in kept.iter().enumerate() {
        coarse_of[v] = c;
    }

    let any_removed = n_fine > n_coarse;
    let grid = if any_removed {
        if coarse.face_count() == 0 {
            return Err(CoreError::invalid(
                "coarse mesh has no faces: removed vertices cannot be interpolated",
            ));
        }
        Some(FaceGrid::build(coarse))
    } else {
        None
    };

    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(n_fine * 2);
    for v in 0..n_fine {
        if coarse_of[v] != usize::MAX {
            triplets.push((v, coarse_of[v], 1.0));
            continue;
        }
        let grid = grid.as_ref().expect("grid exists when vertices are removed");
        let hit = grid.nearest(fine.vertex(v));
        let face = coarse.faces()[hit.face];
        for (corner, w) in face.iter().zip(hit.barycentric) {
            if w != 0.0 {
                triplets.push((v, *corner, w));
            }
        }
    }
    SparseMatrix::from_triplets(n_fine, n_coarse, &triplets)
}

fn validate_kept(fine_vertex_count: usize, kept: &[usize]) -> Result<()> {
    for pair in kept.windows(2) {
        if pair[0] >= pair[1] {
            return Err(CoreError::invalid(
                "kept indices must be strictly ascending",
            ));
        }
    }
    if let Some(&last) = kept.last() {
        if last >= fine_vertex_count {
            return Err(CoreError::invalid(format!(
                "kept index {last} out of range for {fine_vertex_count} fine vertices"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::primitives::icosphere;
    use crate::sampling::decimate;

    #[test]
    fn identity_decimation_gives_permutation() {
        let m = icosphere(0);
        let kept: Vec<usize> = (0..m.vertex_count()).collect();
        let up = upsampling_matrix(&m, &m, &kept).unwrap();
        let down = downsampling_matrix(m.vertex_count(), &kept).unwrap();
        assert_eq!(up.nnz(), m.vertex_count());
        for i in 0..m.vertex_count() {
            assert_eq!(up.get(i, i), 1.0);
            assert_eq!(down.get(i, i), 1.0);
        }
    }

    #[test]
    fn removed_vertex_at_triangle_centroid_gets_thirds() {
        // Coarse: one triangle. Fine adds its centroid as vertex 3.
        let a = [0.0, 0.0, 0.0];
        let b = [1.0, 0.0, 0.0];
        let c = [0.0, 1.0, 0.0];
        let centroid = [1.0 / 3.0, 1.0 / 3.0, 0.0];
        let fine = Mesh::new(
            vec![a, b, c, centroid],
            vec![[0, 1, 3], [1, 2, 3], [2, 0, 3]],
        )
        .unwrap();
        let coarse = Mesh::new(vec![a, b, c], vec![[0, 1, 2]]).unwrap();
        let up = upsampling_matrix(&fine, &coarse, &[0, 1, 2]).unwrap();
        for j in 0..3 {
            assert!((up.get(3, j) - 1.0 / 3.0).abs() < 1e-12);
        }
        let row_sum: f64 = (0..3).map(|j| up.get(3, j)).sum();
        assert!((row_sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn removed_vertex_on_coarse_vertex_gets_single_weight() {
        // Fine vertex 3 sits exactly on coarse vertex 0.
        let fine = Mesh::new(
            vec![
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0],
            ],
            vec![[0, 1, 2], [3, 1, 2]],
        )
        .unwrap();
        let coarse = Mesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let up = upsampling_matrix(&fine, &coarse, &[0, 1, 2]).unwrap();
        let (cols, vals) = up.row_entries(3);
        assert_eq!(cols, &[0]);
        assert_eq!(vals, &[1.0]);
    }

    #[test]
    fn sphere_rows_sum_to_one_and_updown_is_identity_on_kept() {
        let fine = icosphere(2);
        let d = decimate(&fine, 42, 1000.0).unwrap();
        let up = upsampling_matrix(&fine, &d.mesh, &d.kept).unwrap();
        let down = downsampling_matrix(fine.vertex_count(), &d.kept).unwrap();

        for v in 0..fine.vertex_count() {
            let (cols, vals) = up.row_entries(v);
            assert!(!cols.is_empty(), "row {v} is empty");
            assert!(cols.len() <= 3);
            let sum: f64 = vals.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-9, "row {v} sums to {sum}");
            for &w in vals {
                assert!(w >= -1e-9 && w <= 1.0 + 1e-9);
            }
        }

        // up . down restricted to kept rows is the identity on them.
        let composed = up.mul_dense(&down.to_dense()).unwrap();
        for &v in &d.kept {
            for u in 0..fine.vertex_count() {
                let expect = if u == v { 1.0 } else { 0.0 };
                assert_eq!(composed.get(v, u), expect);
            }
        }
    }

    #[test]
    fn rejects_bad_kept_lists() {
        let m = icosphere(0);
        assert!(upsampling_matrix(&m, &m, &[0, 0, 1]).is_err());
        assert!(downsampling_matrix(3, &[5]).is_err());
        let coarse = Mesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
        )
        .unwrap();
        // kept length != coarse vertex count
        assert!(upsampling_matrix(&m, &coarse, &[0, 1]).is_err());
    }

    #[test]
    fn coarse_without_faces_is_rejected_when_vertices_were_removed() {
        let fine = icosphere(0);
        let coarse = Mesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![],
        )
        .unwrap();
        assert!(upsampling_matrix(&fine, &coarse, &[0, 1, 2]).is_err());
    }
}
