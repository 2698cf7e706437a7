//! Iterative closest point rigid registration.
//!
//! Alternates nearest-neighbor correspondence against a spatial grid with a
//! closed-form least-squares rigid fit (SVD-based, determinant-corrected).
//! Each fit is solved from the original source points, so the returned
//! transform maps the raw source directly onto the target.

use crate::dense::DenseMatrix;
use crate::error::{CoreError, Result};
use crate::spatial::PointGrid;
use nalgebra::{Matrix3, Vector3};

#[derive(Debug, Clone, PartialEq)]
pub struct RigidTransform {
    /// Row-major rotation matrix, orthonormal with determinant +1.
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
    /// Uniform scale; 1 unless the fit was asked to estimate it.
    pub scale: f64,
}

impl RigidTransform {
    pub fn identity() -> RigidTransform {
        RigidTransform {
            rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            translation: [0.0; 3],
            scale: 1.0,
        }
    }

    pub fn apply_point(&self, p: [f64; 3]) -> [f64; 3] {
        let r = &self.rotation;
        [
            self.scale * (r[0][0] * p[0] + r[0][1] * p[1] + r[0][2] * p[2]) + self.translation[0],
            self.scale * (r[1][0] * p[0] + r[1][1] * p[1] + r[1][2] * p[2]) + self.translation[1],
            self.scale * (r[2][0] * p[0] + r[2][1] * p[1] + r[2][2] * p[2]) + self.translation[2],
        ]
    }

    pub fn apply(&self, points: &DenseMatrix) -> Result<DenseMatrix> {
        if points.cols() != 3 {
            return Err(CoreError::shape(format!(
                "rigid transform applies to Nx3 points, got {} columns",
                points.cols()
            )));
        }
        Ok(DenseMatrix::from_fn(points.rows(), 3, |i, j| {
            let row = points.row(i);
            self.apply_point([row[0], row[1], row[2]])[j]
        }))
    }

    /// Rotation angle in radians, from the trace.
    pub fn rotation_angle(&self) -> f64 {
        let r = &self.rotation;
        let trace = r[0][0] + r[1][1] + r[2][2];
        ((trace - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcpConfig {
    pub max_iterations: usize,
    /// Stop once the RMS improves by less than this between iterations.
    pub tolerance: f64,
    /// Also estimate a uniform scale (off for purely rigid alignment).
    pub with_scale: bool,
}

impl Default for IcpConfig {
    fn default() -> Self {
        IcpConfig {
            max_iterations: 50,
            tolerance: 1e-10,
            with_scale: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IcpOutcome {
    pub transform: RigidTransform,
    pub aligned: DenseMatrix,
    /// RMS distance to the matched points after each iteration's fit;
    /// non-increasing by construction.
    pub rms_history: Vec<f64>,
}

fn centroid(points: &[[f64; 3]]) -> [f64; 3] {
    let mut c = [0.0; 3];
    for p in points {
        for j in 0..3 {
            c[j] += p[j];
        }
    }
    let n = points.len() as f64;
    [c[0] / n, c[1] / n, c[2] / n]
}

/// Least-squares `target ~ scale * R * source + t` for paired points.
fn fit_rigid(
    source: &[[f64; 3]],
    target: &[[f64; 3]],
    with_scale: bool,
) -> Result<RigidTransform> {
    let pc = centroid(source);
    let qc = centroid(target);

    let mut h = Matrix3::zeros();
    let mut source_spread = 0.0;
    for (p, q) in source.iter().zip(target) {
        let dp = Vector3::new(p[0] - pc[0], p[1] - pc[1], p[2] - pc[2]);
        let dq = Vector3::new(q[0] - qc[0], q[1] - qc[1], q[2] - qc[2]);
        h += dp * dq.transpose();
        source_spread += dp.norm_squared();
    }

    // sorting puts the smallest singular value last, where the determinant
    // correction flips
    let mut svd = h.svd(true, true);
    svd.sort_by_singular_values();
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let singular = svd.singular_values;
    if !(singular[0] > 0.0) || singular[1] < 1e-9 * singular[0] {
        return Err(CoreError::numerical(
            "point sets are collinear or degenerate; rigid alignment is underdetermined",
        ));
    }

    let v = v_t.transpose();
    let det = (v * u.transpose()).determinant();
    let sign = if det < 0.0 { -1.0 } else { 1.0 };
    let correction = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, sign));
    let r = v * correction * u.transpose();

    let scale = if with_scale {
        if !(source_spread > 0.0) {
            return Err(CoreError::numerical(
                "source points are coincident; scale is underdetermined",
            ));
        }
        (singular[0] + singular[1] + sign * singular[2]) / source_spread
    } else {
        1.0
    };

    let rp = r * Vector3::new(pc[0], pc[1], pc[2]);
    let rotation = [
        [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
        [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
        [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
    ];
    Ok(RigidTransform {
        rotation,
        translation: [
            qc[0] - scale * rp[0],
            qc[1] - scale * rp[1],
            qc[2] - scale * rp[2],
        ],
        scale,
    })
}

fn rows(points: &DenseMatrix) -> Vec<[f64; 3]> {
    (0..points.rows())
        .map(|i| {
            let r = points.row(i);
            [r[0], r[1], r[2]]
        })
        .collect()
}

pub fn icp_align(
    source: &DenseMatrix,
    target: &DenseMatrix,
    config: &IcpConfig,
) -> Result<IcpOutcome> {
    for (name, m) in [("source", source), ("target", target)] {
        if m.cols() != 3 {
            return Err(CoreError::shape(format!(
                "{name} must be Nx3, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if m.rows() < 3 {
            return Err(CoreError::invalid(format!(
                "{name} needs at least 3 points, got {}",
                m.rows()
            )));
        }
    }
    if config.max_iterations == 0 {
        return Err(CoreError::invalid("ICP needs at least one iteration"));
    }
    if !(config.tolerance >= 0.0) {
        return Err(CoreError::invalid(format!(
            "tolerance must be non-negative, got {}",
            config.tolerance
        )));
    }

    let src = rows(source);
    let tgt = rows(target);
    let grid = PointGrid::build(&tgt);

    let mut transform = RigidTransform::identity();
    let mut rms_history = Vec::new();
    let mut prev = f64::INFINITY;
    for _ in 0..config.max_iterations {
        let matched: Vec<[f64; 3]> = src
            .iter()
            .map(|&p| tgt[grid.nearest(transform.apply_point(p)).0])
            .collect();
        transform = fit_rigid(&src, &matched, config.with_scale)?;

        let mut sq = 0.0;
        for (p, q) in src.iter().zip(&matched) {
            let moved = transform.apply_point(*p);
            sq += (moved[0] - q[0]).powi(2) + (moved[1] - q[1]).powi(2) + (moved[2] - q[2]).powi(2);
        }
        let rms = (sq / src.len() as f64).sqrt();
        rms_history.push(rms);
        if prev - rms < config.tolerance {
            break;
        }
        prev = rms;
    }

    let aligned = transform.apply(source)?;
    Ok(IcpOutcome {
        transform,
        aligned,
        rms_history,
    })
}
