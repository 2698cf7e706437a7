//! Quadric-error mesh decimation by half-edge collapse.
//!
//! Each vertex accumulates the plane quadrics of its incident faces;
//! boundary edges additionally contribute a perpendicular constraint plane
//! scaled by `boundary_weight`, which is what keeps open-mesh outlines in
//! place. Collapse candidates are mesh edges only. A collapse moves
//! `v_remove` onto `v_keep` (positions never move), so the cost of a
//! candidate is the combined endpoint quadric evaluated at the surviving
//! position; the cheaper direction wins, ties keep the lower index.
//!
//! The priority queue is lazily invalidated: every vertex carries a version
//! counter bumped when its quadric changes or it dies, and stale entries are
//! dropped at pop time. Queue order is `(cost, removes-boundary-vertex,
//! candidate id)`, all totally ordered, so runs are bit-deterministic.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use crate::error::{CoreError, Result};
use crate::mesh::{face_normal, Mesh};
use crate::spatial::{cross, dot, norm, sub};

use super::quadric::Quadric;

/// Faces with a cross-product norm at or below this are treated as having no
/// reliable plane and contribute no quadric.
const DEGENERATE_FACE_EPS: f64 = 1e-12;

/// Undirected edges incident to exactly one face, canonical `(min, max)`
/// order, sorted ascending.
pub fn boundary_edges(mesh: &Mesh) -> Vec<(usize, usize)> {
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for f in mesh.faces() {
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    counts
        .into_iter()
        .filter_map(|(e, c)| (c == 1).then_some(e))
        .collect()
}

#[derive(Debug, Clone)]
pub struct VertexQuadrics {
    pub quadrics: Vec<Quadric>,
    /// Number of zero-area faces that contributed no plane quadric.
    pub degenerate_faces: usize,
}

/// Per-vertex quadrics: plane quadrics of incident faces plus, for each
/// boundary edge, the plane through the edge perpendicular to its incident
/// face scaled by `boundary_weight` and added to both endpoints.
pub fn vertex_quadrics(mesh: &Mesh, boundary_weight: f64) -> Result<VertexQuadrics> {
    if !(boundary_weight >= 0.0) || !boundary_weight.is_finite() {
        return Err(CoreError::invalid(format!(
            "boundary_weight must be finite and non-negative, got {boundary_weight}"
        )));
    }
    let mut quadrics = vec![Quadric::zero(); mesh.vertex_count()];
    let mut face_planes: Vec<Option<[f64; 4]>> = Vec::with_capacity(mesh.face_count());
    let mut degenerate_faces = 0usize;

    for f in mesh.faces() {
        let p0 = mesh.vertex(f[0]);
        let n = face_normal(p0, mesh.vertex(f[1]), mesh.vertex(f[2]));
        let len = norm(n);
        if len <= DEGENERATE_FACE_EPS {
            degenerate_faces += 1;
            face_planes.push(None);
            continue;
        }
        let u = [n[0] / len, n[1] / len, n[2] / len];
        let d = -dot(u, p0);
        face_planes.push(Some([u[0], u[1], u[2], d]));
        let q = Quadric::from_plane(u[0], u[1], u[2], d);
        for &v in f {
            quadrics[v].add(&q);
        }
    }

    if boundary_weight > 0.0 {
        // Map each boundary edge to its single incident face.
        let mut incident: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        for (fi, f) in mesh.faces().iter().enumerate() {
            for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
                let key = (a.min(b), a.max(b));
                incident
                    .entry(key)
                    .and_modify(|e| e.1 += 1)
                    .or_insert((fi, 1));
            }
        }
        for ((a, b), (fi, count)) in incident {
            if count != 1 {
                continue;
            }
            let Some(plane) = face_planes[fi] else {
                continue; // boundary of a degenerate face: no reliable normal
            };
            let pa = mesh.vertex(a);
            let e = sub(mesh.vertex(b), pa);
            let elen = norm(e);
            if elen <= DEGENERATE_FACE_EPS {
                continue;
            }
            let e = [e[0] / elen, e[1] / elen, e[2] / elen];
            let nc = cross(e, [plane[0], plane[1], plane[2]]);
            let nclen = norm(nc);
            if nclen <= DEGENERATE_FACE_EPS {
                continue;
            }
            let nc = [nc[0] / nclen, nc[1] / nclen, nc[2] / nclen];
            let d = -dot(nc, pa);
            let q = Quadric::from_plane(nc[0], nc[1], nc[2], d).scaled(boundary_weight);
            quadrics[a].add(&q);
            quadrics[b].add(&q);
        }
    }

    Ok(VertexQuadrics {
        quadrics,
        degenerate_faces,
    })
}

#[derive(Debug, Clone)]
pub struct Decimation {
    pub mesh: Mesh,
    /// `kept[c]` is the original vertex index of coarse vertex `c`,
    /// ascending.
    pub kept: Vec<usize>,
    /// False when no legal collapse remained before hitting the target; the
    /// achieved count is `mesh.vertex_count()`.
    pub reached_target: bool,
}

struct Candidate {
    cost: f64,
    removes_boundary: bool,
    id: u64,
    keep: u32,
    remove: u32,
    ver_keep: u32,
    ver_remove: u32,
}

impl Candidate {
    fn key(&self) -> (f64, bool, u64) {
        (self.cost, self.removes_boundary, self.id)
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
impl Eq for Candidate {}
impl Ord for Candidate {
    // Reversed: BinaryHeap is a max-heap, we pop the smallest key first.
    fn cmp(&self, other: &Self) -> Ordering {
        let (ac, ab, ai) = self.key();
        let (bc, bb, bi) = other.key();
        bc.total_cmp(&ac)
            .then_with(|| bb.cmp(&ab))
            .then_with(|| bi.cmp(&ai))
    }
}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct DecimateState {
    positions: Vec<[f64; 3]>,
    quadrics: Vec<Quadric>,
    alive_vertex: Vec<bool>,
    version: Vec<u32>,
    boundary_vertex: Vec<bool>,
    faces: Vec<[usize; 3]>,
    alive_face: Vec<bool>,
    vertex_faces: Vec<Vec<usize>>,
    heap: BinaryHeap<Candidate>,
    next_id: u64,
    alive_count: usize,
}

impl DecimateState {
    fn push_candidate(&mut self, a: usize, b: usize) {
        let qa = &self.quadrics[a];
        let qb = &self.quadrics[b];
        let mut combined = *qa;
        combined.add(qb);
        let cost_a = combined.error(self.positions[a]);
        let cost_b = combined.error(self.positions[b]);
        let (keep, remove, cost) = match cost_a.total_cmp(&cost_b) {
            Ordering::Less => (a, b, cost_a),
            Ordering::Greater => (b, a, cost_b),
            Ordering::Equal => {
                let keep = a.min(b);
                (keep, a.max(b), cost_a)
            }
        };
        let id = self.next_id;
        self.next_id += 1;
        self.heap.push(Candidate {
            cost,
            removes_boundary: self.boundary_vertex[remove],
            id,
            keep: keep as u32,
            remove: remove as u32,
            ver_keep: self.version[keep],
            ver_remove: self.version[remove],
        });
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.vertex_faces[v]
            .iter()
            .filter(|&&f| self.alive_face[f])
            .flat_map(|&f| self.faces[f])
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks legality of collapsing `remove` onto `keep` and returns the
    /// face ids that die and the ones that get remapped.
    fn plan_collapse(&self, keep: usize, remove: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        let mut dying = Vec::new();
        let mut remapped = Vec::new();

        // Triples that will exist around `keep` after the collapse; used to
        // reject duplicate faces.
        let mut keep_triples: BTreeSet<[usize; 3]> = BTreeSet::new();
        for &f in &self.vertex_faces[keep] {
            if !self.alive_face[f] {
                continue;
            }
            let corners = self.faces[f];
            if corners.contains(&remove) {
                continue; // dies below
            }
            let mut t = corners;
            t.sort_unstable();
            keep_triples.insert(t);
        }

        for &f in &self.vertex_faces[remove] {
            if !self.alive_face[f] {
                continue;
            }
            let corners = self.faces[f];
            if corners.contains(&keep) {
                dying.push(f);
                continue;
            }
            let before = face_normal(
                self.positions[corners[0]],
                self.positions[corners[1]],
                self.positions[corners[2]],
            );
            let new_corners = corners.map(|v| if v == remove { keep } else { v });
            let after = face_normal(
                self.positions[new_corners[0]],
                self.positions[new_corners[1]],
                self.positions[new_corners[2]],
            );
            if dot(before, after) < 0.0 {
                return None; // would flip a face
            }
            let mut t = new_corners;
            t.sort_unstable();
            if !keep_triples.insert(t) {
                return None; // would create a duplicate face
            }
            remapped.push(f);
        }

        Some((dying, remapped))
    }

    fn apply_collapse(&mut self, keep: usize, remove: usize, dying: &[usize], remapped: &[usize]) {
        for &f in dying {
            self.alive_face[f] = false;
        }
        for &f in remapped {
            for c in &mut self.faces[f] {
                if *c == remove {
                    *c = keep;
                }
            }
        }
        let moved: Vec<usize> = remapped.to_vec();
        self.vertex_faces[keep].extend(moved);
        self.vertex_faces[remove].clear();

        let removed_quadric = self.quadrics[remove];
        self.quadrics[keep].add(&removed_quadric);
        self.alive_vertex[remove] = false;
        self.alive_count -= 1;
        self.version[keep] = self.version[keep].wrapping_add(1);
        self.version[remove] = self.version[remove].wrapping_add(1);
    }
}

/// Decimates `mesh` down to `target_vertices` by greedy half-edge collapse.
///
/// `target_vertices == mesh.vertex_count()` is a no-op. When legal collapses
/// run out before the target is reached, the result carries what was
/// achieved with `reached_target == false`. Identical inputs produce
/// bit-identical results.
pub fn decimate(mesh: &Mesh, target_vertices: usize, boundary_weight: f64) -> Result<Decimation> {
    let n = mesh.vertex_count();
    if target_vertices < 3 {
        return Err(CoreError::invalid(format!(
            "target vertex count must be at least 3, got {target_vertices}"
        )));
    }
    if target_vertices > n {
        return Err(CoreError::invalid(format!(
            "target vertex count {target_vertices} exceeds mesh size {n}"
        )));
    }
    if target_vertices == n {
        return Ok(Decimation {
            mesh: mesh.clone(),
            kept: (0..n).collect(),
            reached_target: true,
        });
    }

    let vq = vertex_quadrics(mesh, boundary_weight)?;

    let mut boundary_vertex = vec![false; n];
    for (a, b) in boundary_edges(mesh) {
        boundary_vertex[a] = true;
        boundary_vertex[b] = true;
    }

    let mut vertex_faces: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (fi, f) in mesh.faces().iter().enumerate() {
        for &v in f {
            vertex_faces[v].push(fi);
        }
    }

    let mut state = DecimateState {
        positions: mesh.vertices().to_vec(),
        quadrics: vq.quadrics,
        alive_vertex: vec![true; n],
        version: vec![0; n],
        boundary_vertex,
        faces: mesh.faces().to_vec(),
        alive_face: vec![true; mesh.face_count()],
        vertex_faces,
        heap: BinaryHeap::new(),
        next_id: 0,
        alive_count: n,
    };

    for (a, b) in mesh.edges() {
        state.push_candidate(a, b);
    }

    while state.alive_count > target_vertices {
        let Some(cand) = state.heap.pop() else {
            break; // no legal collapse remains: stop early
        };
        let keep = cand.keep as usize;
        let remove = cand.remove as usize;
        if !state.alive_vertex[keep]
            || !state.alive_vertex[remove]
            || state.version[keep] != cand.ver_keep
            || state.version[remove] != cand.ver_remove
        {
            continue; // stale entry
        }
        let Some((dying, remapped)) = state.plan_collapse(keep, remove) else {
            continue; // illegal now; a fresh candidate appears if the
                      // neighborhood changes
        };
        state.apply_collapse(keep, remove, &dying, &remapped);
        for u in state.neighbors(keep) {
            state.push_candidate(keep, u);
        }
    }

    let reached_target = state.alive_count == target_vertices;

    let kept: Vec<usize> = (0..n).filter(|&v| state.alive_vertex[v]).collect();
    let mut old_to_new = vec![usize::MAX; n];
    for (c, &v) in kept.iter().enumerate() {
        old_to_new[v] = c;
    }
    let vertices: Vec<[f64; 3]> = kept.iter().map(|&v| state.positions[v]).collect();
    let faces: Vec<[usize; 3]> = state
        .faces
        .iter()
        .zip(&state.alive_face)
        .filter_map(|(f, &alive)| alive.then(|| f.map(|v| old_to_new[v])))
        .collect();

    Ok(Decimation {
        mesh: Mesh::new(vertices, faces)?,
        kept,
        reached_target,
    })
}
