//! Schnyder woods: validation, construction, paths, regions and restriction.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::triangulation::{FaceId, SubTriangulation, TriangleKind, Triangulation, VertexId};

/// One of the three tree colours. Displayed and serialized as 1, 2 or 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Colour {
    One,
    Two,
    Three,
}

impl Colour {
    pub const ALL: [Colour; 3] = [Colour::One, Colour::Two, Colour::Three];

    /// Zero-based index: `One` is 0.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Colour {
        Colour::ALL[i % 3]
    }

    /// `i + 1`, cyclically.
    pub fn next(self) -> Colour {
        Colour::from_index(self.index() + 1)
    }

    /// `i - 1`, cyclically.
    pub fn prev(self) -> Colour {
        Colour::from_index(self.index() + 2)
    }
}

impl From<Colour> for u8 {
    fn from(c: Colour) -> u8 {
        c.index() as u8 + 1
    }
}

impl TryFrom<u8> for Colour {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1..=3 => Ok(Colour::from_index(v as usize - 1)),
            _ => Err(format!("colour must be 1, 2 or 3, got {v}")),
        }
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index() + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeLabel {
    pub tail: VertexId,
    pub head: VertexId,
    pub colour: Colour,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    /// Three outgoing edges per interior vertex in rotational order.
    D1,
    /// Interior edges at an exterior vertex are incoming in its colour.
    D2,
    /// Each colour class is a tree.
    Tree,
    /// The labels cover exactly the interior edges.
    Coverage,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WoodViolation {
    #[error("({tail}, {head}) is not an interior edge")]
    NotInteriorEdge { tail: VertexId, head: VertexId },
    #[error("edge ({u}, {v}) is labelled more than once")]
    DuplicateEdge { u: VertexId, v: VertexId },
    #[error("interior edge ({u}, {v}) is unlabelled")]
    UnlabelledEdge { u: VertexId, v: VertexId },
    #[error("wood covers {found} vertices, triangulation has {expected}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("exterior vertex {vertex} has outgoing edge to {head}")]
    ExteriorOutgoing { vertex: VertexId, head: VertexId },
    #[error("edge ({tail}, {exterior}) into exterior vertex {exterior} has colour {colour}")]
    ExteriorColour { exterior: VertexId, tail: VertexId, colour: Colour },
    #[error("vertex {vertex} has {count} outgoing edges of colour {colour}")]
    OutgoingCount { vertex: VertexId, colour: Colour, count: usize },
    #[error("colour order around vertex {vertex} breaks at neighbour {neighbour}")]
    RotationOrder { vertex: VertexId, neighbour: VertexId },
    #[error("colour {colour} edges contain a cycle through {vertex}")]
    TreeCycle { colour: Colour, vertex: VertexId },
}

impl WoodViolation {
    pub fn axiom(&self) -> Axiom {
        use WoodViolation::*;
        match self {
            NotInteriorEdge { .. } | DuplicateEdge { .. } | UnlabelledEdge { .. } | SizeMismatch { .. } => Axiom::Coverage,
            ExteriorOutgoing { .. } | ExteriorColour { .. } => Axiom::D2,
            OutgoingCount { .. } | RotationOrder { .. } => Axiom::D1,
            TreeCycle { .. } => Axiom::Tree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WoodError {
    #[error("({0}, {1}, {2}) is not a separating triangle")]
    NotSeparating(VertexId, VertexId, VertexId),
    #[error("({0}, {1}, {2}) is not cyclically oriented")]
    NotCyclic(VertexId, VertexId, VertexId),
    #[error(transparent)]
    Invalid(#[from] WoodViolation),
}

/// Wood JSON: `{"edges": [{"tail", "head", "colour"}, ...]}`. Reading one
/// back needs the triangulation, see [`SchnyderWood::from_labels`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WoodFile {
    pub edges: Vec<EdgeLabel>,
}

impl From<SchnyderWood> for WoodFile {
    fn from(s: SchnyderWood) -> Self {
        WoodFile { edges: s.labels() }
    }
}

/// A Schnyder wood stored as the three outgoing neighbours of every
/// interior vertex, indexed by colour.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "WoodFile")]
pub struct SchnyderWood {
    out: Vec<Option<[VertexId; 3]>>,
}

impl SchnyderWood {
    /// Wrap raw out-neighbour triples without checking them.
    pub fn from_out(out: Vec<Option<[VertexId; 3]>>) -> Self {
        SchnyderWood { out }
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn out(&self, v: VertexId) -> Option<[VertexId; 3]> {
        self.out[v]
    }

    pub fn outgoing(&self, v: VertexId, c: Colour) -> Option<VertexId> {
        self.out[v].map(|o| o[c.index()])
    }

    pub(crate) fn out_mut(&mut self) -> &mut [Option<[VertexId; 3]>] {
        &mut self.out
    }

    /// The label of edge `{u, v}` if it is oriented in this wood.
    pub fn label(&self, u: VertexId, v: VertexId) -> Option<EdgeLabel> {
        let find = |tail: VertexId, head: VertexId| {
            let o = self.out[tail]?;
            let c = o.iter().position(|&w| w == head)?;
            Some(EdgeLabel { tail, head, colour: Colour::from_index(c) })
        };
        find(u, v).or_else(|| find(v, u))
    }

    /// All labels, sorted by tail then colour.
    pub fn labels(&self) -> Vec<EdgeLabel> {
        let mut out = Vec::new();
        for (tail, o) in self.out.iter().enumerate() {
            if let Some(o) = o {
                for c in Colour::ALL {
                    out.push(EdgeLabel { tail, head: o[c.index()], colour: c });
                }
            }
        }
        out
    }

    /// Build and fully validate a wood from edge labels.
    pub fn from_labels(t: &Triangulation, labels: &[EdgeLabel]) -> Result<Self, WoodViolation> {
        let n = t.n();
        let mut out = vec![None::<[Option<VertexId>; 3]>; n];
        let mut seen = HashSet::new();
        for l in labels {
            if l.tail >= n || l.head >= n || !t.has_edge(l.tail, l.head) || t.is_exterior_edge(l.tail, l.head) {
                return Err(WoodViolation::NotInteriorEdge { tail: l.tail, head: l.head });
            }
            if !seen.insert((l.tail.min(l.head), l.tail.max(l.head))) {
                return Err(WoodViolation::DuplicateEdge { u: l.tail, v: l.head });
            }
            if t.is_exterior(l.tail) {
                return Err(WoodViolation::ExteriorOutgoing { vertex: l.tail, head: l.head });
            }
            if let Some(i) = t.exterior_index(l.head) {
                if i != l.colour.index() {
                    return Err(WoodViolation::ExteriorColour { exterior: l.head, tail: l.tail, colour: l.colour });
                }
            }
            let slot = &mut out[l.tail].get_or_insert([None; 3])[l.colour.index()];
            if slot.is_some() {
                return Err(WoodViolation::OutgoingCount { vertex: l.tail, colour: l.colour, count: 2 });
            }
            *slot = Some(l.head);
        }
        let mut wood = Vec::with_capacity(n);
        for (v, slots) in out.iter().enumerate() {
            if t.is_exterior(v) {
                wood.push(None);
                continue;
            }
            let o = slots.unwrap_or([None; 3]);
            let mut full = [0; 3];
            for c in Colour::ALL {
                full[c.index()] = o[c.index()].ok_or(WoodViolation::OutgoingCount { vertex: v, colour: c, count: 0 })?;
            }
            wood.push(Some(full));
        }
        let wood = SchnyderWood { out: wood };
        validate_wood(t, &wood)?;
        Ok(wood)
    }
}

/// Check the wood axioms and the tree property; reports the first violation.
pub fn validate_wood(t: &Triangulation, s: &SchnyderWood) -> Result<(), WoodViolation> {
    let n = t.n();
    if s.n() != n {
        return Err(WoodViolation::SizeMismatch { expected: n, found: s.n() });
    }
    for v in 0..n {
        match (t.exterior_index(v), s.out[v]) {
            (Some(_), Some(o)) => {
                return Err(WoodViolation::ExteriorOutgoing { vertex: v, head: o[0] });
            }
            (None, None) => {
                return Err(WoodViolation::OutgoingCount { vertex: v, colour: Colour::One, count: 0 });
            }
            (None, Some(o)) => {
                for c in Colour::ALL {
                    let head = o[c.index()];
                    if head >= n || !t.has_edge(v, head) {
                        return Err(WoodViolation::NotInteriorEdge { tail: v, head });
                    }
                    if let Some(i) = t.exterior_index(head) {
                        if i != c.index() {
                            return Err(WoodViolation::ExteriorColour { exterior: head, tail: v, colour: c });
                        }
                    }
                    if o[c.next().index()] == head {
                        return Err(WoodViolation::OutgoingCount { vertex: v, colour: c, count: 0 });
                    }
                }
            }
            (Some(_), None) => {}
        }
    }
    for (u, v) in t.interior_edges() {
        let uv = s.out[u].is_some_and(|o| o.contains(&v));
        let vu = s.out[v].is_some_and(|o| o.contains(&u));
        match (uv, vu) {
            (true, true) => return Err(WoodViolation::DuplicateEdge { u, v }),
            (false, false) => return Err(WoodViolation::UnlabelledEdge { u, v }),
            _ => {}
        }
    }
    for v in t.interior_vertices() {
        check_rotation(t, s, v)?;
    }
    for c in Colour::ALL {
        // 0 = unvisited, 1 = on the current walk, 2 = known to reach the root.
        let mut state = vec![0u8; n];
        for start in t.interior_vertices() {
            let mut walk = Vec::new();
            let mut v = start;
            while state[v] == 0 && !t.is_exterior(v) {
                state[v] = 1;
                walk.push(v);
                v = s.out[v].unwrap()[c.index()];
            }
            if state[v] == 1 {
                return Err(WoodViolation::TreeCycle { colour: c, vertex: v });
            }
            for w in walk {
                state[w] = 2;
            }
        }
    }
    Ok(())
}

/// Clockwise from out1: out1, in3*, out2, in1*, out3, in2*.
fn check_rotation(t: &Triangulation, s: &SchnyderWood, v: VertexId) -> Result<(), WoodViolation> {
    let o = s.out[v].unwrap();
    let rot = t.rotation(v);
    let start = rot.iter().position(|&w| w == o[0]).unwrap();
    let mut expect_out = 0usize;
    for k in 0..rot.len() {
        let w = rot[(start + k) % rot.len()];
        let bad = WoodViolation::RotationOrder { vertex: v, neighbour: w };
        if expect_out < 3 && w == o[expect_out] {
            expect_out += 1;
            continue;
        }
        if o.contains(&w) {
            return Err(bad);
        }
        // An incoming edge after out_j (1-based j = expect_out) has colour j - 1.
        let want = Colour::from_index(expect_out + 1);
        match s.out[w] {
            Some(ow) if ow[want.index()] == v => {}
            _ => return Err(bad),
        }
    }
    if expect_out != 3 {
        return Err(WoodViolation::RotationOrder { vertex: v, neighbour: o[expect_out] });
    }
    Ok(())
}

/// A Schnyder wood built by canonical-order elimination, always removing the
/// lowest-numbered eligible vertex.
pub fn compute_wood(t: &Triangulation) -> SchnyderWood {
    let n = t.n();
    let [a1, a2, a3] = t.exterior();
    let mut out = vec![None::<[VertexId; 3]>; n];
    let mut partial = vec![[usize::MAX; 3]; n];
    let mut removed = vec![false; n];
    let mut on_chain = vec![false; n];
    // Number of chain vertices adjacent to each vertex.
    let mut count = vec![0usize; n];
    let mut next = vec![usize::MAX; n];
    let mut prev = vec![usize::MAX; n];

    removed[a1] = true;
    let rot = t.rotation(a1);
    let start = rot.iter().position(|&w| w == a2).unwrap();
    let chain: Vec<VertexId> = (0..rot.len()).map(|k| rot[(start + k) % rot.len()]).collect();
    debug_assert_eq!(*chain.last().unwrap(), a3);
    for pair in chain.windows(2) {
        next[pair[0]] = pair[1];
        prev[pair[1]] = pair[0];
    }
    let mut eligible = BTreeSet::new();
    let add_to_chain = |v: VertexId, on_chain: &mut Vec<bool>, count: &mut Vec<usize>| {
        on_chain[v] = true;
        for &w in t.rotation(v) {
            count[w] += 1;
        }
    };
    for &v in &chain {
        if v != a2 && v != a3 {
            partial[v][0] = a1;
        }
        add_to_chain(v, &mut on_chain, &mut count);
    }
    let is_eligible = |v: VertexId, on_chain: &[bool], count: &[usize]| on_chain[v] && v != a2 && v != a3 && count[v] == 2;
    for &v in &chain {
        if is_eligible(v, &on_chain, &count) {
            eligible.insert(v);
        }
    }

    while let Some(x) = eligible.pop_first() {
        let (l, r) = (prev[x], next[x]);
        partial[x][1] = l;
        partial[x][2] = r;
        out[x] = Some(partial[x]);
        removed[x] = true;
        on_chain[x] = false;
        for &w in t.rotation(x) {
            count[w] -= 1;
        }
        // Lower neighbours, clockwise from l to r, replace x on the chain.
        let rot = t.rotation(x);
        let from = rot.iter().position(|&w| w == l).unwrap();
        let mut last = l;
        let mut touched = vec![l, r];
        for k in 1..rot.len() {
            let u = rot[(from + k) % rot.len()];
            if u == r {
                break;
            }
            partial[u][0] = x;
            add_to_chain(u, &mut on_chain, &mut count);
            next[last] = u;
            prev[u] = last;
            last = u;
            touched.push(u);
            touched.extend(t.rotation(u).iter().copied());
        }
        next[last] = r;
        prev[r] = last;
        touched.extend(t.rotation(x).iter().copied());
        for v in touched {
            if removed[v] {
                continue;
            }
            if is_eligible(v, &on_chain, &count) {
                eligible.insert(v);
            } else {
                eligible.remove(&v);
            }
        }
    }
    SchnyderWood { out }
}

/// `P_c(v)`: the directed path from `v` to the exterior in colour `c`.
pub fn path(s: &SchnyderWood, v: VertexId, c: Colour) -> Vec<VertexId> {
    let mut p = vec![v];
    let mut v = v;
    while let Some(o) = s.out[v] {
        v = o[c.index()];
        p.push(v);
    }
    p
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionDecomposition {
    pub vertex: VertexId,
    /// `paths[i]` is `P_{i+1}(v)`.
    pub paths: [Vec<VertexId>; 3],
    /// `regions[i]` is `R_{i+1}(v)`, sorted face ids.
    pub regions: [Vec<FaceId>; 3],
}

/// Paths and regions of an interior vertex, found by flood fill between paths.
pub fn paths_and_regions(t: &Triangulation, s: &SchnyderWood, v: VertexId) -> RegionDecomposition {
    let paths = Colour::ALL.map(|c| path(s, v, c));
    let o = s.out[v].expect("paths_and_regions needs an interior vertex");
    let regions = Colour::ALL.map(|c| {
        let mut barrier = HashSet::new();
        for p in [&paths[c.next().index()], &paths[c.prev().index()]] {
            for e in p.windows(2) {
                barrier.insert((e[0].min(e[1]), e[0].max(e[1])));
            }
        }
        let b = t.cw_next(v, o[c.next().index()]);
        let mut faces = t.flood(t.left_face(v, b), |x, y| barrier.contains(&(x.min(y), x.max(y))), false);
        faces.sort_unstable();
        faces
    });
    RegionDecomposition { vertex: v, paths, regions }
}

/// `D_c(v)`: `v` and every vertex whose colour-`c` path passes through `v`.
pub fn descendants(t: &Triangulation, s: &SchnyderWood, v: VertexId, c: Colour) -> Vec<VertexId> {
    let mut children = vec![Vec::new(); t.n()];
    for u in t.interior_vertices() {
        children[s.out[u].unwrap()[c.index()]].push(u);
    }
    let mut out = vec![v];
    let mut head = 0;
    while head < out.len() {
        let u = out[head];
        head += 1;
        out.extend(children[u].iter().copied());
    }
    out.sort_unstable();
    out
}

/// The orientation of the 3-cycle `(x, y, z)`: `Some(true)` if its edges run
/// `x -> y -> z -> x`, `Some(false)` for the reverse, `None` if not cyclic.
pub fn cyclic_direction(s: &SchnyderWood, [x, y, z]: [VertexId; 3]) -> Option<bool> {
    let dir = |a, b| s.label(a, b).map(|l| l.tail == a);
    match (dir(x, y)?, dir(y, z)?, dir(z, x)?) {
        (true, true, true) => Some(true),
        (false, false, false) => Some(false),
        _ => None,
    }
}

/// Restrict a wood to `T|_C` for a cyclically oriented separating triangle.
/// The exterior of the sub-triangulation is labelled so that its `a_i` is the
/// vertex of `C` receiving colour-`i` edges from inside.
pub fn restrict_wood(t: &Triangulation, s: &SchnyderWood, c: [VertexId; 3]) -> Result<(SubTriangulation, SchnyderWood), WoodError> {
    let tri = match t.triangle(c[0], c[1], c[2]) {
        Some(tri) if tri.kind == TriangleKind::Separating => tri,
        _ => return Err(WoodError::NotSeparating(c[0], c[1], c[2])),
    };
    let ccw = tri.vertices;
    if cyclic_direction(s, ccw).is_none() {
        return Err(WoodError::NotCyclic(c[0], c[1], c[2]));
    }
    let inner = t.vertices_inside(ccw);
    let mut role = [usize::MAX; 3];
    for &b in &ccw {
        let u = t.rotation(b).iter().copied().find(|u| inner.binary_search(u).is_ok()).expect("separating triangle has inner neighbours");
        let l = s.label(u, b).filter(|l| l.tail == u).ok_or(WoodViolation::RotationOrder { vertex: b, neighbour: u })?;
        role[l.colour.index()] = b;
    }
    let [x, y, z] = ccw;
    let cw_rotations = [[x, z, y], [z, y, x], [y, x, z]];
    if !cw_rotations.contains(&role) {
        return Err(WoodError::Invalid(WoodViolation::RotationOrder { vertex: x, neighbour: y }));
    }
    let sub = t.restrict_with_exterior(role);
    let map = |v: VertexId| sub.from_parent[v].unwrap();
    let out =
        sub.to_parent.iter().map(|&p| if sub.triangulation.is_exterior(map(p)) { None } else { s.out[p].map(|o| o.map(map)) }).collect();
    let wood = SchnyderWood { out };
    validate_wood(&sub.triangulation, &wood)?;
    Ok((sub, wood))
}
