//! Exact nearest-neighbor queries over points and triangles.
//!
//! Both grids hash items into uniform cells and answer queries by scanning
//! outward ring by ring until no unscanned cell can beat the best squared
//! distance found so far. The scan bound is strict, so candidates tied at
//! exactly the best distance are never skipped; ties resolve to the lowest
//! item index, independent of scan order.

use std::collections::HashMap;

use crate::mesh::Mesh;

pub fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = sub(a, b);
    dot(d, d)
}

/// Closest point on triangle `(a, b, c)` to `p`, with barycentric weights.
///
/// Region classification follows the standard edge/vertex case analysis, so
/// weights are exactly 0/1 in vertex regions and have an exact zero in edge
/// regions. Degenerate (zero-area) triangles fall back to the closest of the
/// three edge segments.
pub fn closest_point_on_triangle(
    p: [f64; 3],
    a: [f64; 3],
    b: [f64; 3],
    c: [f64; 3],
) -> ([f64; 3], [f64; 3]) {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = sub(p, a);
    let d1 = dot(ab, ap);
    let d2 = dot(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (a, [1.0, 0.0, 0.0]);
    }

    let bp = sub(p, b);
    let d3 = dot(ab, bp);
    let d4 = dot(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (b, [0.0, 1.0, 0.0]);
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let denom = d1 - d3;
        if denom > 0.0 {
            let v = d1 / denom;
            return (
                [a[0] + v * ab[0], a[1] + v * ab[1], a[2] + v * ab[2]],
                [1.0 - v, v, 0.0],
            );
        }
    }

    let cp = sub(p, c);
    let d5 = dot(ab, cp);
    let d6 = dot(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (c, [0.0, 0.0, 1.0]);
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let denom = d2 - d6;
        if denom > 0.0 {
            let w = d2 / denom;
            return (
                [a[0] + w * ac[0], a[1] + w * ac[1], a[2] + w * ac[2]],
                [1.0 - w, 0.0, w],
            );
        }
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let denom = (d4 - d3) + (d5 - d6);
        if denom > 0.0 {
            let w = (d4 - d3) / denom;
            let bc = sub(c, b);
            return (
                [b[0] + w * bc[0], b[1] + w * bc[1], b[2] + w * bc[2]],
                [0.0, 1.0 - w, w],
            );
        }
    }

    let denom = va + vb + vc;
    if denom > 0.0 {
        let v = vb / denom;
        let w = vc / denom;
        let q = [
            a[0] + v * ab[0] + w * ac[0],
            a[1] + v * ab[1] + w * ac[1],
            a[2] + v * ab[2] + w * ac[2],
        ];
        return (q, [1.0 - v - w, v, w]);
    }

    // Degenerate triangle: take the best of the three edges.
    let mut best = closest_point_on_segment(p, a, b);
    let mut bary = [1.0 - best.1, best.1, 0.0];
    let cand = closest_point_on_segment(p, a, c);
    if dist2(p, cand.0) < dist2(p, best.0) {
        bary = [1.0 - cand.1, 0.0, cand.1];
        best = cand;
    }
    let cand = closest_point_on_segment(p, b, c);
    if dist2(p, cand.0) < dist2(p, best.0) {
        bary = [0.0, 1.0 - cand.1, cand.1];
        best = cand;
    }
    (best.0, bary)
}

/// Closest point on segment `(a, b)` as `(point, t)` with `t` in `[0, 1]`.
fn closest_point_on_segment(p: [f64; 3], a: [f64; 3], b: [f64; 3]) -> ([f64; 3], f64) {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return (a, 0.0);
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    ([a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]], t)
}

type Cell = (i32, i32, i32);

fn cell_extent(min: [f64; 3], max: [f64; 3], items: usize) -> f64 {
    let extent = (max[0] - min[0])
        .max(max[1] - min[1])
        .max(max[2] - min[2]);
    let resolution = (items.max(1) as f64).cbrt().ceil().max(1.0);
    let h = extent / resolution;
    if h > 0.0 && h.is_finite() {
        h
    } else {
        1.0
    }
}

fn bbox(points: impl Iterator<Item = [f64; 3]>) -> ([f64; 3], [f64; 3]) {
    let mut min = [f64::INFINITY; 3];
    let mut max = [f64::NEG_INFINITY; 3];
    for p in points {
        for k in 0..3 {
            min[k] = min[k].min(p[k]);
            max[k] = max[k].max(p[k]);
        }
    }
    (min, max)
}

fn cell_of(p: [f64; 3], origin: [f64; 3], h: f64) -> Cell {
    (
        ((p[0] - origin[0]) / h).floor() as i32,
        ((p[1] - origin[1]) / h).floor() as i32,
        ((p[2] - origin[2]) / h).floor() as i32,
    )
}

/// Chebyshev distance from `c` to the cell box `[lo, hi]`; 0 when inside.
fn cheb_to_box(c: Cell, lo: Cell, hi: Cell) -> i32 {
    let d = |v: i32, lo: i32, hi: i32| {
        if v < lo {
            lo - v
        } else if v > hi {
            v - hi
        } else {
            0
        }
    };
    d(c.0, lo.0, hi.0).max(d(c.1, lo.1, hi.1)).max(d(c.2, lo.2, hi.2))
}

/// Largest Chebyshev distance from `c` to any corner of `[lo, hi]`.
fn cheb_to_box_far(c: Cell, lo: Cell, hi: Cell) -> i32 {
    let d = |v: i32, lo: i32, hi: i32| (v - lo).abs().max((v - hi).abs());
    d(c.0, lo.0, hi.0).max(d(c.1, lo.1, hi.1)).max(d(c.2, lo.2, hi.2))
}

fn inside_box(c: Cell, lo: Cell, hi: Cell) -> bool {
    c.0 >= lo.0 && c.0 <= hi.0 && c.1 >= lo.1 && c.1 <= hi.1 && c.2 >= lo.2 && c.2 <= hi.2
}

/// Uniform-grid index over a fixed point set; exact nearest neighbor with
/// ties broken by the lowest point index.
pub struct PointGrid {
    points: Vec<[f64; 3]>,
    origin: [f64; 3],
    h: f64,
    cells: HashMap<Cell, Vec<u32>>,
    cell_lo: Cell,
    cell_hi: Cell,
}

impl PointGrid {
    pub fn build(points: &[[f64; 3]]) -> PointGrid {
        assert!(!points.is_empty(), "point grid needs at least one point");
        let (min, max) = bbox(points.iter().copied());
        let h = cell_extent(min, max, points.len());
        let mut cells: HashMap<Cell, Vec<u32>> = HashMap::new();
        let mut cell_lo = (i32::MAX, i32::MAX, i32::MAX);
        let mut cell_hi = (i32::MIN, i32::MIN, i32::MIN);
        for (i, &p) in points.iter().enumerate() {
            let c = cell_of(p, min, h);
            cells.entry(c).or_default().push(i as u32);
            cell_lo = (cell_lo.0.min(c.0), cell_lo.1.min(c.1), cell_lo.2.min(c.2));
            cell_hi = (cell_hi.0.max(c.0), cell_hi.1.max(c.1), cell_hi.2.max(c.2));
        }
        PointGrid {
            points: points.to_vec(),
            origin: min,
            h,
            cells,
            cell_lo,
            cell_hi,
        }
    }

    /// Index of the stored point nearest to `p`, plus squared distance.
    pub fn nearest(&self, p: [f64; 3]) -> (usize, f64) {
        let center = cell_of(p, self.origin, self.h);
        let last_ring = cheb_to_box_far(center, self.cell_lo, self.cell_hi);
        let mut best: Option<(f64, u32)> = None;
        let mut ring = cheb_to_box(center, self.cell_lo, self.cell_hi);
        loop {
            for_ring(center, ring, |cell| {
                if !inside_box(cell, self.cell_lo, self.cell_hi) {
                    return;
                }
                if let Some(items) = self.cells.get(&cell) {
                    for &i in items {
                        let d2 = dist2(p, self.points[i as usize]);
                        if best.map_or(true, |(bd, bi)| (d2, i) < (bd, bi)) {
                            best = Some((d2, i));
                        }
                    }
                }
            });
            // All unscanned cells are at Chebyshev ring > `ring`; the nearest
            // point of such a cell is at least `ring * h` away from p. The
            // strict comparison keeps exact ties in play until scanned.
            if let Some((bd, _)) = best {
                let bound = ring as f64 * self.h;
                if bound * bound > bd {
                    break;
                }
            }
            if ring > last_ring {
                break; // every occupied cell has been scanned
            }
            ring += 1;
        }
        let (d2, i) = best.expect("grid contains at least one point");
        (i as usize, d2)
    }
}

/// Uniform-grid index over mesh triangles; exact nearest face with ties
/// broken by the lowest face index.
pub struct FaceGrid {
    vertices: Vec<[f64; 3]>,
    faces: Vec<[usize; 3]>,
    origin: [f64; 3],
    h: f64,
    cells: HashMap<Cell, Vec<u32>>,
    cell_lo: Cell,
    cell_hi: Cell,
    stamp: std::cell::RefCell<(u32, Vec<u32>)>,
}

/// Result of a nearest-face query.
#[derive(Debug, Clone, Copy)]
pub struct NearestFace {
    pub face: usize,
    pub point: [f64; 3],
    pub barycentric: [f64; 3],
    pub distance2: f64,
}

impl FaceGrid {
    pub fn build(mesh: &Mesh) -> FaceGrid {
        assert!(mesh.face_count() > 0, "face grid needs at least one face");
        let vertices = mesh.vertices().to_vec();
        let faces = mesh.faces().to_vec();
        let (min, max) = bbox(faces.iter().flat_map(|f| f.iter().map(|&v| vertices[v])));
        let h = cell_extent(min, max, faces.len());
        let mut cells: HashMap<Cell, Vec<u32>> = HashMap::new();
        let mut cell_lo = (i32::MAX, i32::MAX, i32::MAX);
        let mut cell_hi = (i32::MIN, i32::MIN, i32::MIN);
        for (fi, f) in faces.iter().enumerate() {
            let (fmin, fmax) = bbox(f.iter().map(|&v| vertices[v]));
            let lo = cell_of(fmin, min, h);
            let hi = cell_of(fmax, min, h);
            cell_lo = (cell_lo.0.min(lo.0), cell_lo.1.min(lo.1), cell_lo.2.min(lo.2));
            cell_hi = (cell_hi.0.max(hi.0), cell_hi.1.max(hi.1), cell_hi.2.max(hi.2));
            for x in lo.0..=hi.0 {
                for y in lo.1..=hi.1 {
                    for z in lo.2..=hi.2 {
                        cells.entry((x, y, z)).or_default().push(fi as u32);
                    }
                }
            }
        }
        let nfaces = faces.len();
        FaceGrid {
            vertices,
            faces,
            origin: min,
            h,
            cells,
            cell_lo,
            cell_hi,
            stamp: std::cell::RefCell::new((0, vec![0; nfaces])),
        }
    }

    pub fn nearest(&self, p: [f64; 3]) -> NearestFace {
        let mut stamp = self.stamp.borrow_mut();
        stamp.0 += 1;
        let query = stamp.0;

        let center = cell_of(p, self.origin, self.h);
        let last_ring = cheb_to_box_far(center, self.cell_lo, self.cell_hi);
        let mut best: Option<(f64, u32, [f64; 3], [f64; 3])> = None;
        let mut ring = cheb_to_box(center, self.cell_lo, self.cell_hi);
        loop {
            for_ring(center, ring, |cell| {
                if !inside_box(cell, self.cell_lo, self.cell_hi) {
                    return;
                }
                if let Some(items) = self.cells.get(&cell) {
                    for &fi in items {
                        if stamp.1[fi as usize] == query {
                            continue;
                        }
                        stamp.1[fi as usize] = query;
                        let f = self.faces[fi as usize];
                        let (q, bary) = closest_point_on_triangle(
                            p,
                            self.vertices[f[0]],
                            self.vertices[f[1]],
                            self.vertices[f[2]],
                        );
                        let d2 = dist2(p, q);
                        if best.map_or(true, |(bd, bi, _, _)| (d2, fi) < (bd, bi)) {
                            best = Some((d2, fi, q, bary));
                        }
                    }
                }
            });
            if let Some((bd, _, _, _)) = best {
                let bound = ring as f64 * self.h;
                if bound * bound > bd {
                    break;
                }
            }
            if ring > last_ring {
                break; // every occupied cell has been scanned
            }
            ring += 1;
        }
        let (d2, fi, q, bary) = best.expect("grid contains at least one face");
        NearestFace {
            face: fi as usize,
            point: q,
            barycentric: bary,
            distance2: d2,
        }
    }
}

/// Visits every cell at exactly Chebyshev distance `ring` from `center`.
fn for_ring(center: Cell, ring: i32, mut visit: impl FnMut(Cell)) {
    if ring == 0 {
        visit(center);
        return;
    }
    let (cx, cy, cz) = center;
    for dx in -ring..=ring {
        for dy in -ring..=ring {
            if dx.abs() == ring || dy.abs() == ring {
                for dz in -ring..=ring {
                    visit((cx + dx, cy + dy, cz + dz));
                }
            } else {
                visit((cx + dx, cy + dy, cz - ring));
                visit((cx + dx, cy + dy, cz + ring));
            }
        }
    }
}
