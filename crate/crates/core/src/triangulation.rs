//! Combinatorial planar triangulations with a distinguished exterior face.
//!
//! Interior faces are stored counterclockwise and the exterior triple
//! `(a1, a2, a3)` clockwise, so every face (the exterior included) lies to
//! the left of its own directed boundary edges.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
pub type FaceId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangulationError {
    #[error("face {face} is not a triangle on three distinct vertices in 0..{n}")]
    NonTriangularFace { face: usize, n: usize },
    #[error("expected {expected} {what}, found {found}")]
    EulerViolation { what: &'static str, expected: usize, found: usize },
    #[error("vertex {vertex} is not connected to vertex 0")]
    DisconnectedInput { vertex: VertexId },
    #[error("faces disagree on the orientation of edge ({u}, {v})")]
    OrientationInconsistent { u: VertexId, v: VertexId },
    #[error("({0}, {1}, {2}) is not a separating triangle")]
    NotSeparating(VertexId, VertexId, VertexId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangleKind {
    Facial,
    Separating,
}

/// A 3-cycle of a triangulation, stored counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TriangleRef {
    pub vertices: [VertexId; 3],
    pub kind: TriangleKind,
}

/// A triangulation cut out of a larger one, with the vertex correspondence.
#[derive(Debug, Clone)]
pub struct SubTriangulation {
    pub triangulation: Triangulation,
    /// `to_parent[v]` is the id in the parent of sub-vertex `v`.
    pub to_parent: Vec<VertexId>,
    /// `from_parent[v]` is the sub-vertex for parent vertex `v`, if kept.
    pub from_parent: Vec<Option<VertexId>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TriangulationFile", into = "TriangulationFile")]
pub struct Triangulation {
    n: usize,
    exterior: [VertexId; 3],
    faces: Vec<[VertexId; 3]>,
    // Flat half-edge arrays: the darts of `u` occupy offsets[u]..offsets[u+1],
    // ordered clockwise around `u`.
    offsets: Vec<usize>,
    heads: Vec<VertexId>,
    left: Vec<FaceId>,
    twin: Vec<usize>,
    // Per vertex, neighbours sorted by id and the matching rotation index.
    sorted_nbrs: Vec<VertexId>,
    sorted_rank: Vec<usize>,
}

/// The on-disk form: 0-based ids, counterclockwise interior faces, the
/// clockwise exterior not repeated among `faces`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationFile {
    pub n: usize,
    pub exterior: [VertexId; 3],
    pub faces: Vec<[VertexId; 3]>,
}

impl TryFrom<TriangulationFile> for Triangulation {
    type Error = TriangulationError;

    fn try_from(f: TriangulationFile) -> Result<Self, TriangulationError> {
        Triangulation::build(f.n, f.exterior, f.faces)
    }
}

impl From<Triangulation> for TriangulationFile {
    fn from(t: Triangulation) -> Self {
        TriangulationFile { n: t.n, exterior: t.exterior, faces: t.faces }
    }
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.exterior == other.exterior && self.faces == other.faces
    }
}

impl Eq for Triangulation {}

impl Triangulation {
    pub fn build(n: usize, exterior: [VertexId; 3], faces: Vec<[VertexId; 3]>) -> Result<Self, TriangulationError> {
        if n < 3 {
            return Err(TriangulationError::EulerViolation { what: "vertices (at least)", expected: 3, found: n });
        }
        let triangle_ok = |t: &[VertexId; 3]| t.iter().all(|&v| v < n) && t[0] != t[1] && t[1] != t[2] && t[0] != t[2];
        if !triangle_ok(&exterior) {
            return Err(TriangulationError::NonTriangularFace { face: faces.len(), n });
        }
        if let Some(face) = faces.iter().position(|t| !triangle_ok(t)) {
            return Err(TriangulationError::NonTriangularFace { face, n });
        }
        if faces.len() != 2 * n - 5 {
            return Err(TriangulationError::EulerViolation { what: "interior faces", expected: 2 * n - 5, found: faces.len() });
        }

        // at[u] holds (v, w, face) for every face (u, v, w) through u.
        let mut at: Vec<Vec<(VertexId, VertexId, FaceId)>> = vec![Vec::new(); n];
        for (f, t) in faces.iter().chain(std::iter::once(&exterior)).enumerate() {
            for k in 0..3 {
                at[t[k]].push((t[(k + 1) % 3], t[(k + 2) % 3], f));
            }
        }
        let mut directed = 0usize;
        for (u, list) in at.iter_mut().enumerate() {
            list.sort_unstable();
            for pair in list.windows(2) {
                if pair[0].0 == pair[1].0 {
                    return Err(TriangulationError::OrientationInconsistent { u, v: pair[0].0 });
                }
            }
            directed += list.len();
        }
        if directed != 2 * (3 * n - 6) {
            return Err(TriangulationError::EulerViolation { what: "edges", expected: 3 * n - 6, found: directed / 2 });
        }

        let mut offsets = Vec::with_capacity(n + 1);
        let mut heads = Vec::with_capacity(directed);
        let mut left = Vec::with_capacity(directed);
        let mut sorted_nbrs = Vec::with_capacity(directed);
        offsets.push(0);
        for u in 0..n {
            let list = &at[u];
            if list.is_empty() {
                return Err(TriangulationError::DisconnectedInput { vertex: u });
            }
            let find = |v: VertexId| list.binary_search_by_key(&v, |e| e.0).ok();
            // Every dart u->v needs a face on each side: the ccw successor w
            // must itself be a dart of u, and v->u must exist.
            for &(v, w, _) in list {
                if find(w).is_none() {
                    return Err(TriangulationError::OrientationInconsistent { u, v: w });
                }
                if at[v].binary_search_by_key(&u, |e| e.0).is_err() {
                    return Err(TriangulationError::OrientationInconsistent { u, v });
                }
            }
            // Walk clockwise: the cw successor of v is the x with ccw_next(u, x) = v.
            let mut cw_of = vec![usize::MAX; list.len()];
            for (i, &(_, w, _)) in list.iter().enumerate() {
                cw_of[find(w).unwrap()] = i;
            }
            let start = offsets[u];
            let mut i = 0;
            loop {
                heads.push(list[i].0);
                left.push(list[i].2);
                i = cw_of[i];
                if i == usize::MAX {
                    return Err(TriangulationError::OrientationInconsistent { u, v: list[0].0 });
                }
                if i == 0 {
                    break;
                }
                if heads.len() - start > list.len() {
                    return Err(TriangulationError::OrientationInconsistent { u, v: list[i].0 });
                }
            }
            if heads.len() - start != list.len() {
                // The faces around u form more than one fan.
                return Err(TriangulationError::OrientationInconsistent { u, v: list[0].0 });
            }
            sorted_nbrs.extend(list.iter().map(|e| e.0));
            offsets.push(heads.len());
        }
        let mut sorted_rank = vec![0; directed];
        for u in 0..n {
            let range = offsets[u]..offsets[u + 1];
            for k in range.clone() {
                let i = sorted_nbrs[range.clone()].binary_search(&heads[k]).unwrap();
                sorted_rank[offsets[u] + i] = k - offsets[u];
            }
        }
        let rank_of = |u: VertexId, v: VertexId| {
            let range = offsets[u]..offsets[u + 1];
            sorted_rank[offsets[u] + sorted_nbrs[range].binary_search(&v).unwrap()]
        };
        let mut twin = vec![0; directed];
        for u in 0..n {
            for k in offsets[u]..offsets[u + 1] {
                let v = heads[k];
                twin[k] = offsets[v] + rank_of(v, u);
            }
        }

        let t = Triangulation { n, exterior, faces, offsets, heads, left, twin, sorted_nbrs, sorted_rank };
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &v in t.rotation(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        if let Some(vertex) = seen.iter().position(|s| !s) {
            return Err(TriangulationError::DisconnectedInput { vertex });
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The exterior vertices `(a1, a2, a3)` in clockwise order.
    pub fn exterior(&self) -> [VertexId; 3] {
        self.exterior
    }

    /// Interior faces, each counterclockwise. Face ids index this slice.
    pub fn faces(&self) -> &[[VertexId; 3]] {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// The id used for the exterior face in face queries.
    pub fn exterior_face(&self) -> FaceId {
        self.faces.len()
    }

    /// Boundary of face `f` with the face on the left of each edge.
    /// The exterior face yields `(a1, a2, a3)`.
    pub fn face_cycle(&self, f: FaceId) -> [VertexId; 3] {
        if f == self.faces.len() {
            self.exterior
        } else {
            self.faces[f]
        }
    }

    /// Exterior role of `v`: `Some(i)` with `v == a_{i+1}`.
    pub fn exterior_index(&self, v: VertexId) -> Option<usize> {
        self.exterior.iter().position(|&a| a == v)
    }

    pub fn is_exterior(&self, v: VertexId) -> bool {
        self.exterior.contains(&v)
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.n).filter(|&v| !self.is_exterior(v))
    }

    /// Neighbours of `u` in clockwise order.
    pub fn rotation(&self, u: VertexId) -> &[VertexId] {
        &self.heads[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: VertexId) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.sorted_nbrs[self.offsets[u]..self.offsets[u + 1]].binary_search(&v).is_ok()
    }

    /// Global index of the dart `u -> v`.
    pub fn dart(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let range = self.offsets[u]..self.offsets[u + 1];
        let i = self.sorted_nbrs[range].binary_search(&v).ok()?;
        Some(self.offsets[u] + self.sorted_rank[self.offsets[u] + i])
    }

    /// The reverse of dart `d`.
    pub fn twin(&self, d: usize) -> usize {
        self.twin[d]
    }

    /// Head vertex of dart `d`.
    pub fn dart_head(&self, d: usize) -> VertexId {
        self.heads[d]
    }

    /// Face to the left of dart `d`.
    pub fn dart_left(&self, d: usize) -> FaceId {
        self.left[d]
    }

    pub fn dart_count(&self) -> usize {
        self.heads.len()
    }

    /// First dart of `u`; the darts of `u` are contiguous.
    pub fn dart_offset(&self, u: VertexId) -> usize {
        self.offsets[u]
    }

    pub fn cw_next(&self, u: VertexId, v: VertexId) -> VertexId {
        let rot = self.rotation(u);
        let k = self.index_in(u, v);
        rot[(k + 1) % rot.len()]
    }

    pub fn ccw_next(&self, u: VertexId, v: VertexId) -> VertexId {
        let rot = self.rotation(u);
        let k = self.index_in(u, v);
        rot[(k + rot.len() - 1) % rot.len()]
    }

    /// The face to the left of the directed edge `u -> v`.
    pub fn left_face(&self, u: VertexId, v: VertexId) -> FaceId {
        self.left[self.offsets[u] + self.index_in(u, v)]
    }

    fn index_in(&self, u: VertexId, v: VertexId) -> usize {
        match self.dart(u, v) {
            Some(d) => d - self.offsets[u],
            None => panic!("({u}, {v}) is not an edge"),
        }
    }

    /// Undirected edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        (0..self.n)
            .flat_map(|u| self.sorted_nbrs[self.offsets[u]..self.offsets[u + 1]].iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect()
    }

    pub fn is_exterior_edge(&self, u: VertexId, v: VertexId) -> bool {
        u != v && self.is_exterior(u) && self.is_exterior(v)
    }

    pub fn interior_edges(&self) -> Vec<(VertexId, VertexId)> {
        self.edges().into_iter().filter(|&(u, v)| !self.is_exterior_edge(u, v)).collect()
    }

    /// The interior face with vertex set `{a, b, c}`, if any.
    pub fn find_face(&self, a: VertexId, b: VertexId, c: VertexId) -> Option<FaceId> {
        if !self.has_edge(a, b) {
            return None;
        }
        [self.left_face(a, b), self.left_face(b, a)].into_iter().find(|&f| f != self.exterior_face() && self.face_cycle(f).contains(&c))
    }

    fn bounds_face(&self, a: VertexId, b: VertexId, c: VertexId) -> bool {
        self.ccw_next(a, b) == c || self.cw_next(a, b) == c
    }

    /// Classify and orient the 3-cycle on `{a, b, c}`; `None` if it is not a cycle.
    pub fn triangle(&self, a: VertexId, b: VertexId, c: VertexId) -> Option<TriangleRef> {
        if a == b || b == c || a == c || !self.has_edge(a, b) || !self.has_edge(b, c) || !self.has_edge(a, c) {
            return None;
        }
        let kind = if self.bounds_face(a, b, c) { TriangleKind::Facial } else { TriangleKind::Separating };
        let vertices = if self.n == 3 {
            // Both sides are faces; the interior side is to the left of a1 -> a3.
            let [a1, a2, a3] = self.exterior;
            [a1, a3, a2]
        } else {
            self.orient_ccw([a, b, c])
        };
        Some(TriangleRef { vertices, kind })
    }

    /// Reorder a 3-cycle so that its bounded side lies to its left.
    pub fn orient_ccw(&self, [a, b, c]: [VertexId; 3]) -> [VertexId; 3] {
        let reached_exterior = self.flood_faces(self.left_face(a, b), &[a, b, c]).contains(&self.exterior_face());
        if reached_exterior {
            [a, c, b]
        } else {
            [a, b, c]
        }
    }

    /// All faces reachable from `start` without crossing an edge of the cycle.
    fn flood_faces(&self, start: FaceId, cycle: &[VertexId; 3]) -> Vec<FaceId> {
        let barrier = |u: VertexId, v: VertexId| cycle.contains(&u) && cycle.contains(&v);
        self.flood(start, barrier, true)
    }

    /// Breadth-first search in the dual from `start`, never crossing edges
    /// for which `barrier` holds. The exterior face is entered only if
    /// `enter_exterior` is set.
    pub fn flood(&self, start: FaceId, barrier: impl Fn(VertexId, VertexId) -> bool, enter_exterior: bool) -> Vec<FaceId> {
        let mut seen = vec![false; self.faces.len() + 1];
        let mut order = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < order.len() {
            let f = order[head];
            head += 1;
            let t = self.face_cycle(f);
            for k in 0..3 {
                let (u, v) = (t[k], t[(k + 1) % 3]);
                if barrier(u, v) {
                    continue;
                }
                let g = self.left_face(v, u);
                if seen[g] || (!enter_exterior && g == self.exterior_face()) {
                    continue;
                }
                seen[g] = true;
                order.push(g);
            }
        }
        order
    }

    /// Interior faces strictly inside the counterclockwise cycle `c`.
    pub fn faces_inside(&self, c: [VertexId; 3]) -> Vec<FaceId> {
        self.flood_faces(self.left_face(c[0], c[1]), &c)
    }

    /// Vertices strictly inside the counterclockwise cycle `c`, sorted.
    pub fn vertices_inside(&self, c: [VertexId; 3]) -> Vec<VertexId> {
        let mut inner = vec![false; self.n];
        for f in self.faces_inside(c) {
            for v in self.faces[f] {
                inner[v] = !c.contains(&v);
            }
        }
        (0..self.n).filter(|&v| inner[v]).collect()
    }

    /// Every separating triangle, oriented counterclockwise, sorted by vertex set.
    pub fn separating_triangles(&self) -> Vec<TriangleRef> {
        let mut out = Vec::new();
        for (u, v) in self.edges() {
            let nu = &self.sorted_nbrs[self.offsets[u]..self.offsets[u + 1]];
            for &w in nu.iter().filter(|&&w| w > v) {
                if self.has_edge(v, w) && !self.bounds_face(u, v, w) {
                    out.push(TriangleRef { vertices: self.orient_ccw([u, v, w]), kind: TriangleKind::Separating });
                }
            }
        }
        out
    }

    fn separating_ccw(&self, c: [VertexId; 3]) -> Result<[VertexId; 3], TriangulationError> {
        match self.triangle(c[0], c[1], c[2]) {
            Some(TriangleRef { vertices, kind: TriangleKind::Separating }) => Ok(vertices),
            _ => Err(TriangulationError::NotSeparating(c[0], c[1], c[2])),
        }
    }

    /// `T|_C`: the triangulation inside the separating triangle `c`, with `c`
    /// as its clockwise exterior.
    pub fn restrict(&self, c: [VertexId; 3]) -> Result<SubTriangulation, TriangulationError> {
        let [x, y, z] = self.separating_ccw(c)?;
        Ok(self.restrict_with_exterior([x, z, y]))
    }

    /// `T|_C` with a caller-chosen exterior labelling; `exterior` must list
    /// the separating triangle clockwise.
    pub fn restrict_with_exterior(&self, exterior: [VertexId; 3]) -> SubTriangulation {
        let [a1, a2, a3] = exterior;
        let inside = self.faces_inside([a1, a3, a2]);
        let mut keep = vec![false; self.n];
        for &f in &inside {
            for v in self.faces[f] {
                keep[v] = true;
            }
        }
        let (to_parent, from_parent) = renumber(&keep);
        let map = |t: [VertexId; 3]| t.map(|v| from_parent[v].unwrap());
        let mut inside = inside;
        inside.sort_unstable();
        let faces = inside.iter().map(|&f| map(self.faces[f])).collect();
        let triangulation = Triangulation::build(to_parent.len(), map(exterior), faces).expect("restriction is a triangulation");
        SubTriangulation { triangulation, to_parent, from_parent }
    }

    /// `T \ C`: delete the vertices inside the separating triangle `c`.
    pub fn remove_interior(&self, c: [VertexId; 3]) -> Result<SubTriangulation, TriangulationError> {
        let ccw = self.separating_ccw(c)?;
        let mut inside_face = vec![false; self.faces.len()];
        for f in self.faces_inside(ccw) {
            inside_face[f] = true;
        }
        let mut keep = vec![true; self.n];
        for v in self.vertices_inside(ccw) {
            keep[v] = false;
        }
        let (to_parent, from_parent) = renumber(&keep);
        let map = |t: [VertexId; 3]| t.map(|v| from_parent[v].unwrap());
        let mut faces: Vec<_> = (0..self.faces.len()).filter(|&f| !inside_face[f]).map(|f| map(self.faces[f])).collect();
        faces.push(map(ccw));
        let triangulation = Triangulation::build(to_parent.len(), map(self.exterior), faces).expect("removal leaves a triangulation");
        Ok(SubTriangulation { triangulation, to_parent, from_parent })
    }

    /// Sum over interior faces of the dual-graph distance to the exterior face.
    pub fn dual_distance_sum(&self) -> u64 {
        let ext = self.exterior_face();
        let mut dist = vec![u64::MAX; self.faces.len() + 1];
        dist[ext] = 0;
        let mut queue = VecDeque::from([ext]);
        while let Some(f) = queue.pop_front() {
            let t = self.face_cycle(f);
            for k in 0..3 {
                let g = self.left_face(t[(k + 1) % 3], t[k]);
                if dist[g] == u64::MAX {
                    dist[g] = dist[f] + 1;
                    queue.push_back(g);
                }
            }
        }
        dist[..ext].iter().sum()
    }

    /// True when the graph has no separating triangle.
    pub fn is_four_connected(&self) -> bool {
        self.separating_triangles().is_empty()
    }
}

fn renumber(keep: &[bool]) -> (Vec<VertexId>, Vec<Option<VertexId>>) {
    let to_parent: Vec<VertexId> = (0..keep.len()).filter(|&v| keep[v]).collect();
    let mut from_parent = vec![None; keep.len()];
    for (i, &v) in to_parent.iter().enumerate() {
        from_parent[v] = Some(i);
    }
    (to_parent, from_parent)
}
