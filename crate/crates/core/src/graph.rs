//! Graph operators derived from mesh connectivity.
//!
//! The spectral convolution layers consume the symmetric normalized
//! Laplacian `L = I - D^{-1/2} W D^{-1/2}` rescaled to `2L/lambda_max - I`,
//! which maps the spectrum from `[0, lambda_max]` into `[-1, 1]`. The
//! smoothness loss uses the unnormalized Laplacian `D - W`. `W` is always
//! the binary 1-ring adjacency of a triangle mesh: symmetric, zero diagonal,
//! one entry per undirected edge and direction.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::mesh::Mesh;
use crate::sparse::SparseMatrix;

/// Binary vertex adjacency from the 1-ring of the face list. An edge shared
/// by several faces still contributes a single 1 in each direction.
pub fn adjacency(mesh: &Mesh) -> SparseMatrix {
    let n = mesh.vertex_count();
    let edges = mesh.edges();
    let mut triplets = Vec::with_capacity(edges.len() * 2);
    for (a, b) in edges {
        triplets.push((a, b, 1.0));
        triplets.push((b, a, 1.0));
    }
    SparseMatrix::from_triplets(n, n, &triplets).expect("edge indices are validated by Mesh")
}

/// Symmetric normalized Laplacian `I - D^{-1/2} W D^{-1/2}`.
///
/// Vertices with degree zero get `D^{-1/2} = 0`, so their row is exactly the
/// identity row; the spectrum stays within `[0, 2]` either way.
pub fn normalized_laplacian(w: &SparseMatrix) -> Result<SparseMatrix> {
    if w.rows() != w.cols() {
        return Err(CoreError::shape(format!(
            "adjacency must be square, got {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    let n = w.rows();
    let mut d_inv_sqrt = vec![0.0f64; n];
    for (i, dis) in d_inv_sqrt.iter_mut().enumerate() {
        let (_, vals) = w.row_entries(i);
        let degree: f64 = vals.iter().sum();
        if degree > 0.0 {
            *dis = 1.0 / degree.sqrt();
        }
    }
    let mut triplets: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, i, 1.0)).collect();
    for (r, c, v) in w.iter() {
        triplets.push((r, c, -v * d_inv_sqrt[r] * d_inv_sqrt[c]));
    }
    SparseMatrix::from_triplets(n, n, &triplets)
}

/// Unnormalized Laplacian `D - W` for binary adjacency.
///
/// Degrees are integer edge counts, so every entry is an integer-valued
/// float and row sums are exactly zero.
pub fn unnormalized_laplacian(w: &SparseMatrix) -> Result<SparseMatrix> {
    if w.rows() != w.cols() {
        return Err(CoreError::shape(format!(
            "adjacency must be square, got {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    let n = w.rows();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(w.nnz() + n);
    for i in 0..n {
        let (cols, vals) = w.row_entries(i);
        let degree = cols.len() as f64;
        debug_assert!(
            vals.iter().all(|&v| v == 1.0),
            "unnormalized laplacian expects binary adjacency"
        );
        triplets.push((i, i, degree));
        for (&c, &v) in cols.iter().zip(vals) {
            triplets.push((i, c, -v));
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets)
}

/// Spectral rescaling `2 L / lambda_max - I`.
pub fn scaled_laplacian(l: &SparseMatrix, lambda_max: f64) -> Result<SparseMatrix> {
    if l.rows() != l.cols() {
        return Err(CoreError::shape(format!(
            "laplacian must be square, got {}x{}",
            l.rows(),
            l.cols()
        )));
    }
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(CoreError::invalid(format!(
            "lambda_max must be positive and finite, got {lambda_max}"
        )));
    }
    let n = l.rows();
    let scale = 2.0 / lambda_max;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(l.nnz() + n);
    for (r, c, v) in l.iter() {
        triplets.push((r, c, scale * v));
    }
    for i in 0..n {
        triplets.push((i, i, -1.0));
    }
    SparseMatrix::from_triplets(n, n, &triplets)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIterationResult {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Dominant eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration with a Rayleigh-quotient estimate.
///
/// The start vector is drawn from a fixed-seed generator, so results are
/// reproducible. Convergence means the relative change of the estimate
/// between iterations dropped to `tol`; when `max_iters` is exhausted first,
/// the best estimate is returned with `converged = false`.
pub fn max_eigenvalue(m: &SparseMatrix, tol: f64, max_iters: usize) -> Result<PowerIterationResult> {
    if m.rows() != m.cols() {
        return Err(CoreError::shape(format!(
            "matrix must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() == 0 {
        return Err(CoreError::invalid("matrix must be non-empty"));
    }
    if !(tol > 0.0) {
        return Err(CoreError::invalid(format!("tol must be positive, got {tol}")));
    }

    let n = m.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c61_6d62);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = l2_norm(&v);
    for x in &mut v {
        *x /= norm;
    }

    let mut lambda_prev = f64::NAN;
    for iter in 1..=max_iters {
        let w = m.mul_vec(&v)?;
        // Rayleigh quotient with unit-norm v.
        let lambda: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let wnorm = l2_norm(&w);
        if wnorm == 0.0 {
            // v is in the null space; for a PSD matrix reached only when the
            // matrix annihilates the start vector, e.g. the zero matrix.
            return Ok(PowerIterationResult {
                value: 0.0,
                iterations: iter,
                converged: true,
            });
        }
        if lambda_prev.is_finite() && (lambda - lambda_prev).abs() <= tol * lambda.abs().max(1e-300)
        {
            return Ok(PowerIterationResult {
                value: lambda,
                iterations: iter,
                converged: true,
            });
        }
        lambda_prev = lambda;
        for (x, &wx) in v.iter_mut().zip(&w) {
            *x = wx / wnorm;
        }
    }
    Ok(PowerIterationResult {
        value: lambda_prev,
        iterations: max_iters,
        converged: false,
    })
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// How a hierarchy level obtains the `lambda_max` used for rescaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMax {
    /// Estimate per level by power iteration; if the iteration fails to
    /// converge, fall back to 2, the upper bound for normalized Laplacians.
    PowerIteration { tol: f64, max_iters: usize },
    /// Use a fixed value (2 is exact for bipartite components and a safe
    /// upper bound in general).
    Fixed(f64),
}

impl Default for LambdaMax {
    fn default() -> Self {
        LambdaMax::PowerIteration {
            tol: 1e-6,
            max_iters: 1000,
        }
    }
}

impl LambdaMax {
    pub fn resolve(&self, l: &SparseMatrix) -> Result<f64> {
        match *self {
            LambdaMax::Fixed(v) => {
                if !(v > 0.0) || !v.is_finite() {
                    return Err(CoreError::invalid(format!(
                        "fixed lambda_max must be positive and finite, got {v}"
                    )));
                }
                Ok(v)
            }
            LambdaMax::PowerIteration { tol, max_iters } => {
                let r = max_eigenvalue(l, tol, max_iters)?;
                Ok(if r.converged { r.value } else { 2.0 })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::primitives::{icosphere, octahedron};

    fn path3_adjacency() -> SparseMatrix {
        SparseMatrix::from_triplets(
            3,
            3,
            &[(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn adjacency_is_symmetric_binary_zero_diagonal() {
        let m = octahedron();
        let w = adjacency(&m);
        assert_eq!(w.nnz(), 24); // 12 edges, both directions
        for (r, c, v) in w.iter() {
            assert_ne!(r, c);
            assert_eq!(v, 1.0);
            assert_eq!(w.get(c, r), 1.0);
        }
    }

    #[test]
    fn empty_face_list_gives_zero_adjacency() {
        let m = Mesh::new(vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], vec![]).unwrap();
        let w = adjacency(&m);
        assert_eq!(w.nnz(), 0);
    }

    #[test]
    fn normalized_laplacian_path3_hand_values() {
        let l = normalized_laplacian(&path3_adjacency()).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        for i in 0..3 {
            assert!((l.get(i, i) - 1.0).abs() < 1e-15);
        }
        for (r, c) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
            assert!((l.get(r, c) + s).abs() < 1e-15, "l[{r}][{c}] = {}", l.get(r, c));
        }
        assert_eq!(l.get(0, 2), 0.0);
    }

    #[test]
    fn isolated_vertex_row_is_identity() {
        // Vertex 3 isolated next to a single edge 0-1 plus vertex 2 unused.
        let w = SparseMatrix::from_triplets(4, 4, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let l = normalized_laplacian(&w).unwrap();
        assert_eq!(l.get(2, 2), 1.0);
        assert_eq!(l.get(3, 3), 1.0);
        assert_eq!(l.get(3, 0), 0.0);
    }

    #[test]
    fn unnormalized_laplacian_triangle_hand_values() {
        let w = SparseMatrix::from_triplets(
            3,
            3,
            &[
                (0, 1, 1.0),
                (1, 0, 1.0),
                (1, 2, 1.0),
                (2, 1, 1.0),
                (0, 2, 1.0),
                (2, 0, 1.0),
            ],
        )
        .unwrap();
        let l = unnormalized_laplacian(&w).unwrap();
        for i in 0..3 {
            assert_eq!(l.get(i, i), 2.0);
            for j in 0..3 {
                if i != j {
                    assert_eq!(l.get(i, j), -1.0);
                }
            }
        }
    }

    #[test]
    fn unnormalized_rows_sum_to_zero_exactly() {
        let m = icosphere(2);
        let l = unnormalized_laplacian(&adjacency(&m)).unwrap();
        for i in 0..l.rows() {
            let (_, vals) = l.row_entries(i);
            let sum: f64 = vals.iter().sum();
            assert_eq!(sum, 0.0, "row {i}");
        }
    }

    #[test]
    fn scaled_identity_with_lambda_two_is_zero() {
        let l = SparseMatrix::identity(4);
        let s = scaled_laplacian(&l, 2.0).unwrap();
        for (_, _, v) in s.iter() {
            assert_eq!(v, 0.0);
        }
        assert_eq!(s.to_dense(), crate::dense::DenseMatrix::zeros(4, 4));
    }

    #[test]
    fn scaled_rejects_bad_lambda() {
        let l = SparseMatrix::identity(2);
        assert!(scaled_laplacian(&l, 0.0).is_err());
        assert!(scaled_laplacian(&l, -1.0).is_err());
        assert!(scaled_laplacian(&l, f64::NAN).is_err());
    }

    #[test]
    fn power_iteration_identity() {
        let r = max_eigenvalue(&SparseMatrix::identity(5), 1e-12, 100).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_iteration_single_edge_hits_two_fast() {
        let w = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let l = normalized_laplacian(&w).unwrap();
        let r = max_eigenvalue(&l, 1e-9, 100).unwrap();
        assert!(r.converged);
        assert!(r.iterations <= 3, "took {} iterations", r.iterations);
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn power_iteration_zero_matrix() {
        let z = SparseMatrix::from_triplets(3, 3, &[]).unwrap();
        let r = max_eigenvalue(&z, 1e-9, 10).unwrap();
        assert!(r.converged);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn power_iteration_flags_non_convergence() {
        let m = icosphere(1);
        let l = normalized_laplacian(&adjacency(&m)).unwrap();
        let r = max_eigenvalue(&l, 1e-14, 2).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 2);
    }

    #[test]
    fn lambda_strategy_fallback_and_fixed() {
        let m = icosphere(1);
        let l = normalized_laplacian(&adjacency(&m)).unwrap();
        let fixed = LambdaMax::Fixed(2.0).resolve(&l).unwrap();
        assert_eq!(fixed, 2.0);
        let fallback = LambdaMax::PowerIteration {
            tol: 1e-15,
            max_iters: 1,
        }
        .resolve(&l)
        .unwrap();
        assert_eq!(fallback, 2.0);
        assert!(LambdaMax::Fixed(-1.0).resolve(&l).is_err());
    }
}
