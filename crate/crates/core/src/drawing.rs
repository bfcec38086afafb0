//! Weighted Schnyder drawings.
//!
//! A vertex `v` is placed at `(v1, v2, v3)` where `v_i` is the total weight
//! of the faces in region `R_i(v)`; exterior vertex `a_i` sits at `W * e_i`.

use std::collections::BTreeMap;

use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::schnyder::{paths_and_regions, Colour, SchnyderWood};
use crate::triangulation::{FaceId, Triangulation, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("face {face} has non-positive weight {weight}")]
    NonPositive { face: FaceId, weight: i64 },
    #[error("expected {expected} face weights, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("declared total {declared} differs from the weight sum {sum}")]
    TotalMismatch { declared: i64, sum: i64 },
}

/// Positive integer weights on the interior faces, indexed by face id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WeightsFile", into = "WeightsFile")]
pub struct WeightDistribution {
    total: i64,
    weights: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
pub struct WeightsFile {
    #[serde(rename = "W")]
    pub total: i64,
    pub weights: Vec<i64>,
}

impl TryFrom<WeightsFile> for WeightDistribution {
    type Error = WeightError;

    fn try_from(f: WeightsFile) -> Result<Self, WeightError> {
        let w = WeightDistribution::new(f.weights)?;
        if w.total != f.total {
            return Err(WeightError::TotalMismatch { declared: f.total, sum: w.total });
        }
        Ok(w)
    }
}

impl From<WeightDistribution> for WeightsFile {
    fn from(w: WeightDistribution) -> Self {
        WeightsFile { total: w.total, weights: w.weights }
    }
}

impl WeightDistribution {
    pub fn new(weights: Vec<i64>) -> Result<Self, WeightError> {
        if let Some(face) = weights.iter().position(|&w| w <= 0) {
            return Err(WeightError::NonPositive { face, weight: weights[face] });
        }
        Ok(WeightDistribution { total: weights.iter().sum(), weights })
    }

    /// Weight `s` on every interior face.
    pub fn uniform(t: &Triangulation, s: i64) -> Self {
        assert!(s >= 1, "uniform weight must be positive");
        WeightDistribution { total: s * t.face_count() as i64, weights: vec![s; t.face_count()] }
    }

    pub fn total(&self) -> i64 {
        self.total
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn get(&self, f: FaceId) -> i64 {
        self.weights[f]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn scaled(&self, k: i64) -> Self {
        assert!(k >= 1);
        WeightDistribution { total: self.total * k, weights: self.weights.iter().map(|w| w * k).collect() }
    }

    /// True when every face has weight `s`.
    pub fn is_uniform(&self, s: i64) -> bool {
        self.weights.iter().all(|&w| w == s)
    }

    pub fn check_for(&self, t: &Triangulation) -> Result<(), WeightError> {
        if self.weights.len() != t.face_count() {
            return Err(WeightError::CountMismatch { expected: t.face_count(), found: self.weights.len() });
        }
        Ok(())
    }

    pub fn sum_over(&self, faces: &[FaceId]) -> i64 {
        faces.iter().map(|&f| self.weights[f]).sum()
    }
}

/// Barycentric integer coordinates with a common sum `W`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Drawing {
    total: i64,
    coords: Vec<[i64; 3]>,
}

impl Drawing {
    pub fn new(total: i64, coords: Vec<[i64; 3]>) -> Self {
        Drawing { total, coords }
    }

    pub fn total(&self) -> i64 {
        self.total
    }

    pub fn coords(&self) -> &[[i64; 3]] {
        &self.coords
    }

    pub fn get(&self, v: VertexId) -> [i64; 3] {
        self.coords[v]
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// Grid points `(v1, v2)`.
    pub fn project(&self) -> Vec<(i64, i64)> {
        self.coords.iter().map(|c| (c[0], c[1])).collect()
    }

    /// Every triple sums to `W`.
    pub fn is_barycentric(&self) -> bool {
        self.coords.iter().all(|c| c.iter().sum::<i64>() == self.total)
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = self.project();
        seen.sort_unstable();
        seen.windows(2).all(|p| p[0] != p[1])
    }

    /// All projected points lie in `[0, bound]^2`.
    pub fn within_grid(&self, bound: i64) -> bool {
        self.coords.iter().all(|c| (0..=bound).contains(&c[0]) && (0..=bound).contains(&c[1]))
    }
}

impl Serialize for Drawing {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        struct Coords<'a>(&'a [[i64; 3]]);
        impl Serialize for Coords<'_> {
            fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
                let mut m = ser.serialize_map(Some(self.0.len()))?;
                for (v, c) in self.0.iter().enumerate() {
                    m.serialize_entry(&v.to_string(), c)?;
                }
                m.end()
            }
        }
        let mut m = ser.serialize_map(Some(2))?;
        m.serialize_entry("W", &self.total)?;
        m.serialize_entry("coords", &Coords(&self.coords))?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for Drawing {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(rename = "W")]
            total: i64,
            coords: BTreeMap<String, [i64; 3]>,
        }
        let raw = Raw::deserialize(de)?;
        let mut coords = vec![None; raw.coords.len()];
        for (k, c) in raw.coords {
            let v: usize = k.parse().map_err(|_| serde::de::Error::custom(format!("bad vertex id {k:?}")))?;
            let slot = coords.get_mut(v).ok_or_else(|| serde::de::Error::custom(format!("vertex id {v} out of range")))?;
            *slot = Some(c);
        }
        let coords =
            coords.into_iter().map(|c| c.ok_or_else(|| serde::de::Error::custom("vertex ids are not 0..n"))).collect::<Result<_, _>>()?;
        Ok(Drawing { total: raw.total, coords })
    }
}

/// Twice the signed area of face `(p, q, r)` in the `(v1, v2)` projection,
/// positive for a counterclockwise face of the triangulation.
///
/// The `(v1, v2)` projection is a reflection of the combinatorial embedding
/// (the exterior `a1, a2, a3` runs counterclockwise on the grid), so the
/// determinant is taken over `(p, r, q)`.
pub fn face_area2(p: [i64; 2], q: [i64; 2], r: [i64; 2]) -> i64 {
    (r[0] - p[0]) * (q[1] - p[1]) - (r[1] - p[1]) * (q[0] - p[0])
}

/// Every interior face has strictly positive area.
pub fn is_planar(t: &Triangulation, d: &Drawing) -> bool {
    let pt = |v: VertexId| {
        let c = d.coords[v];
        [c[0], c[1]]
    };
    d.n() == t.n() && t.faces().iter().all(|&[p, q, r]| face_area2(pt(p), pt(q), pt(r)) > 0)
}

/// Region weights along the closed contour of one augmented colour tree.
///
/// Walking around tree `T_j` (plus the two exterior edges at `a_j`) visits
/// every face corner once. Each face's weight is charged to its first corner;
/// a chord `uv` then splits the contour into the faces inside the cycle
/// formed with the tree paths, which is a contiguous range of corners.
struct Contour {
    chord_pos: Vec<usize>,
    prefix: Vec<i64>,
}

impl Contour {
    fn new(t: &Triangulation, s: &SchnyderWood, w: &WeightDistribution, j: Colour) -> Contour {
        let ext = t.exterior();
        let root = ext[j.index()];
        let parent = |v: VertexId| -> Option<VertexId> {
            match s.out(v) {
                Some(o) => Some(o[j.index()]),
                None if v == root => None,
                None => Some(root),
            }
        };
        let is_tree = |x: VertexId, y: VertexId| parent(x) == Some(y) || parent(y) == Some(x);
        let mut charged = vec![false; t.face_count() + 1];
        charged[t.exterior_face()] = true;
        let mut corner_weight = Vec::with_capacity(t.dart_count());
        let mut chord_pos = vec![usize::MAX; t.dart_count()];

        let start = t.dart(root, ext[j.next().index()]).unwrap();
        let mut d = start;
        loop {
            let f = t.dart_left(d);
            corner_weight.push(if charged[f] { 0 } else { w.get(f) });
            charged[f] = true;
            let x = t.dart_head(t.twin(d));
            let off = t.dart_offset(x);
            let deg = t.degree(x);
            let e = off + (d - off + deg - 1) % deg;
            let nxt = t.dart_head(e);
            if is_tree(x, nxt) {
                d = t.twin(e);
            } else {
                chord_pos[e] = corner_weight.len();
                d = e;
            }
            if d == start {
                break;
            }
        }
        let mut prefix = Vec::with_capacity(corner_weight.len() + 1);
        prefix.push(0);
        for c in corner_weight {
            prefix.push(prefix.last().unwrap() + c);
        }
        Contour { chord_pos, prefix }
    }

    /// Weight enclosed by edge `uv` and the tree paths from `u` and `v`.
    fn delta(&self, t: &Triangulation, u: VertexId, v: VertexId) -> i64 {
        let d = t.dart(u, v).unwrap();
        let p = self.chord_pos[d];
        if p == usize::MAX {
            return 0;
        }
        let q = self.chord_pos[t.twin(d)];
        self.prefix[p.max(q)] - self.prefix[p.min(q)]
    }
}

/// Coordinates of the weighted Schnyder drawing of `(t, s, w)`.
///
/// Runs in linear time: `w(R_i(v)) = w(R_i(u)) + delta_{i+1}(vu)` for
/// `u = out_{i-1}(v)`, evaluated down tree `T_{i-1}`.
pub fn draw(t: &Triangulation, s: &SchnyderWood, w: &WeightDistribution) -> Drawing {
    let n = t.n();
    let total = w.total();
    let ext = t.exterior();
    let mut coords = vec![[0i64; 3]; n];
    for (i, &a) in ext.iter().enumerate() {
        coords[a][i] = total;
    }
    for c in Colour::ALL {
        let i = c.index();
        let contour = Contour::new(t, s, w, c.next());
        let tree = c.prev().index();
        let mut children = vec![Vec::new(); n];
        for v in t.interior_vertices() {
            children[s.out(v).unwrap()[tree]].push(v);
        }
        let mut queue = vec![ext[tree]];
        while let Some(u) = queue.pop() {
            for &v in &children[u] {
                coords[v][i] = coords[u][i] + contour.delta(t, v, u);
                queue.push(v);
            }
        }
    }
    Drawing { total, coords }
}

/// `(w(R_1(v)), w(R_2(v)), w(R_3(v)))` by explicit region flood fill.
pub fn region_sums(t: &Triangulation, s: &SchnyderWood, w: &WeightDistribution, v: VertexId) -> [i64; 3] {
    match t.exterior_index(v) {
        Some(i) => {
            let mut c = [0; 3];
            c[i] = w.total();
            c
        }
        None => paths_and_regions(t, s, v).regions.map(|r| w.sum_over(&r)),
    }
}

/// [`draw`] computed face by face from the regions; quadratic time.
pub fn draw_by_regions(t: &Triangulation, s: &SchnyderWood, w: &WeightDistribution) -> Drawing {
    Drawing { total: w.total(), coords: (0..t.n()).map(|v| region_sums(t, s, w, v)).collect() }
}
