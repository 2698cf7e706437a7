//! Triangle meshes: vertex positions plus face connectivity.
//!
//! A mesh is immutable after construction; the constructor enforces the
//! structural invariants every downstream stage relies on (in-range face
//! indices, no degenerate index triples, at least three vertices once faces
//! exist). Positions are free — geometric degeneracy such as zero-area faces
//! is handled where it matters (quadric assembly, normal checks).

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<[f64; 3]>,
    faces: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn new(vertices: Vec<[f64; 3]>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if !faces.is_empty() && vertices.len() < 3 {
            return Err(CoreError::invalid(format!(
                "mesh with {} faces needs at least 3 vertices, got {}",
                faces.len(),
                vertices.len()
            )));
        }
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                if v >= vertices.len() {
                    return Err(CoreError::invalid(format!(
                        "face {fi} references vertex {v}, mesh has {}",
                        vertices.len()
                    )));
                }
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(CoreError::invalid(format!(
                    "face {fi} repeats a vertex index: [{}, {}, {}]",
                    f[0], f[1], f[2]
                )));
            }
        }
        Ok(Mesh { vertices, faces })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex(&self, i: usize) -> [f64; 3] {
        self.vertices[i]
    }

    /// Vertex positions as an N x 3 matrix.
    pub fn coords(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.vertices.len(), 3, |i, j| self.vertices[i][j])
    }

    /// Same connectivity with positions replaced by the rows of `coords`.
    pub fn with_coords(&self, coords: &DenseMatrix) -> Result<Mesh> {
        if coords.rows() != self.vertices.len() || coords.cols() != 3 {
            return Err(CoreError::shape(format!(
                "coordinate matrix {}x{} for mesh with {} vertices",
                coords.rows(),
                coords.cols(),
                self.vertices.len()
            )));
        }
        let vertices = (0..coords.rows())
            .map(|i| [coords.get(i, 0), coords.get(i, 1), coords.get(i, 2)])
            .collect();
        Ok(Mesh {
            vertices,
            faces: self.faces.clone(),
        })
    }

    /// Unordered edge list; each edge appears once as `(min, max)`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| {
                [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]
                    .into_iter()
                    .map(|(a, b)| (a.min(b), a.max(b)))
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}

pub fn face_normal(p0: [f64; 3], p1: [f64; 3], p2: [f64; 3]) -> [f64; 3] {
    let u = [p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]];
    let v = [p2[0] - p0[0], p2[1] - p0[1], p2[2] - p0[2]];
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

pub mod primitives {
    //! Procedurally generated meshes used by the toy presets and tests.

    use std::collections::BTreeMap;

    use super::Mesh;

    /// Regular octahedron with unit vertices on the coordinate axes.
    pub fn octahedron() -> Mesh {
        let vertices = vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ];
        let faces = vec![
            [0, 2, 4],
            [2, 1, 4],
            [1, 3, 4],
            [3, 0, 4],
            [2, 0, 5],
            [1, 2, 5],
            [3, 1, 5],
            [0, 3, 5],
        ];
        Mesh::new(vertices, faces).expect("octahedron is a valid mesh")
    }

    /// Unit icosphere: an icosahedron subdivided `subdivisions` times with
    /// all vertices projected to the unit sphere. Vertex counts follow
    /// 10 * 4^k + 2: 12, 42, 162, 642, 2562, ...
    pub fn icosphere(subdivisions: u32) -> Mesh {
        let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let mut vertices: Vec<[f64; 3]> = vec![
            [-1.0, phi, 0.0],
            [1.0, phi, 0.0],
            [-1.0, -phi, 0.0],
            [1.0, -phi, 0.0],
            [0.0, -1.0, phi],
            [0.0, 1.0, phi],
            [0.0, -1.0, -phi],
            [0.0, 1.0, -phi],
            [phi, 0.0, -1.0],
            [phi, 0.0, 1.0],
            [-phi, 0.0, -1.0],
            [-phi, 0.0, 1.0],
        ];
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];

        for _ in 0..subdivisions {
            let mut midpoints: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[f64; 3]>| -> usize {
                let key = (a.min(b), a.max(b));
                *midpoints.entry(key).or_insert_with(|| {
                    let pa = vertices[a];
                    let pb = vertices[b];
                    vertices.push([
                        (pa[0] + pb[0]) / 2.0,
                        (pa[1] + pb[1]) / 2.0,
                        (pa[2] + pb[2]) / 2.0,
                    ]);
                    vertices.len() - 1
                })
            };
            let mut next = Vec::with_capacity(faces.len() * 4);
            for [a, b, c] in faces {
                let ab = midpoint(a, b, &mut vertices);
                let bc = midpoint(b, c, &mut vertices);
                let ca = midpoint(c, a, &mut vertices);
                next.push([a, ab, ca]);
                next.push([b, bc, ab]);
                next.push([c, ca, bc]);
                next.push([ab, bc, ca]);
            }
            faces = next;
        }

        for v in &mut vertices {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            v[0] /= n;
            v[1] /= n;
            v[2] /= n;
        }
        Mesh::new(vertices, faces).expect("icosphere is a valid mesh")
    }

    /// Flat rectangular patch in the z = 0 plane with `nx * ny` vertices
    /// spaced `spacing` apart; each grid cell is split into two triangles.
    pub fn grid_patch(nx: usize, ny: usize, spacing: f64) -> Mesh {
        assert!(nx >= 2 && ny >= 2, "grid needs at least 2x2 vertices");
        let mut vertices = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                vertices.push([i as f64 * spacing, j as f64 * spacing, 0.0]);
            }
        }
        let idx = |i: usize, j: usize| j * nx + i;
        let mut faces = Vec::with_capacity((nx - 1) * (ny - 1) * 2);
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let v00 = idx(i, j);
                let v10 = idx(i + 1, j);
                let v01 = idx(i, j + 1);
                let v11 = idx(i + 1, j + 1);
                faces.push([v00, v10, v11]);
                faces.push([v00, v11, v01]);
            }
        }
        Mesh::new(vertices, faces).expect("grid patch is a valid mesh")
    }
}
