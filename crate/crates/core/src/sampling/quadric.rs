//! Plane-sum error quadrics.
//!
//! A quadric is a symmetric 4x4 form Q such that for homogeneous point
//! v = (x, y, z, 1), `v^T Q v` is the sum of squared distances to the planes
//! accumulated into Q. Only the upper triangle is stored (10 coefficients).

/// Coefficient order: xx xy xz xw yy yz yw zz zw ww, where the plane is
/// `ax + by + cz + d = 0` and (x, y, z, w) is the homogeneous point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quadric {
    q: [f64; 10],
}

impl Quadric {
    pub fn zero() -> Quadric {
        Quadric::default()
    }

    /// Quadric of a single plane with unit normal `(a, b, c)` and offset `d`.
    pub fn from_plane(a: f64, b: f64, c: f64, d: f64) -> Quadric {
        Quadric {
            q: [
                a * a,
                a * b,
                a * c,
                a * d,
                b * b,
                b * c,
                b * d,
                c * c,
                c * d,
                d * d,
            ],
        }
    }

    pub fn add(&mut self, other: &Quadric) {
        for (a, b) in self.q.iter_mut().zip(&other.q) {
            *a += b;
        }
    }

    pub fn scaled(&self, s: f64) -> Quadric {
        let mut q = self.q;
        for v in &mut q {
            *v *= s;
        }
        Quadric { q }
    }

    /// `v^T Q v` at `p`; tiny negative floating-point residue is clamped to
    /// zero since a sum of squared plane distances cannot be negative.
    pub fn error(&self, p: [f64; 3]) -> f64 {
        let [x, y, z] = p;
        let q = &self.q;
        let e = q[0] * x * x
            + q[4] * y * y
            + q[7] * z * z
            + q[9]
            + 2.0 * (q[1] * x * y + q[2] * x * z + q[3] * x + q[5] * y * z + q[6] * y + q[8] * z);
        if e < 0.0 {
            0.0
        } else {
            e
        }
    }
}
