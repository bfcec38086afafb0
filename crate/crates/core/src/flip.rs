//! Flips and flops of cyclically oriented triangles.
//!
//! A triangle is always named `(x, y, z)` in the labelling of its
//! counterclockwise state, where the edges run `x -> y` (colour 1),
//! `y -> z` (colour 3) and `z -> x` (colour 2). A flip takes it to the
//! clockwise state `y -> x` (3), `z -> y` (2), `x -> z` (1); a flop goes back.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drawing::{draw, Drawing, WeightDistribution};
use crate::schnyder::{descendants, path, restrict_wood, Colour, SchnyderWood};
use crate::triangulation::{FaceId, TriangleKind, Triangulation, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Counterclockwise to clockwise.
    Flip,
    /// Clockwise to counterclockwise.
    Flop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlipEvent {
    pub triangle: [VertexId; 3],
    pub direction: Direction,
    pub kind: TriangleKind,
}

impl FlipEvent {
    /// The same triangle in the opposite direction.
    pub fn inverse(self) -> FlipEvent {
        FlipEvent {
            direction: match self.direction {
                Direction::Flip => Direction::Flop,
                Direction::Flop => Direction::Flip,
            },
            ..self
        }
    }

    fn sort_key(&self) -> [VertexId; 3] {
        let mut k = self.triangle;
        k.sort_unstable();
        k
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlipError {
    #[error("cannot {direction:?} triangle {triangle:?}: {reason}")]
    InvalidFlip { triangle: [VertexId; 3], direction: Direction, reason: &'static str },
    #[error("maximal flip sequences ended at different woods")]
    DistinctSinks,
}

/// Weights of the regions `Delta_1(yz)`, `Delta_2(xy)`, `Delta_3(xz)` in the
/// counterclockwise state, and the weight `w_c` enclosed by the triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegionWeights {
    pub delta1: i64,
    pub delta2: i64,
    pub delta3: i64,
    pub w_c: i64,
}

fn is_flippable(s: &SchnyderWood, [x, y, z]: [VertexId; 3]) -> bool {
    let o = |v: VertexId| s.out(v);
    matches!((o(x), o(y), o(z)), (Some(ox), Some(oy), Some(oz)) if ox[0] == y && oy[2] == z && oz[1] == x)
}

fn is_floppable(s: &SchnyderWood, [x, y, z]: [VertexId; 3]) -> bool {
    let o = |v: VertexId| s.out(v);
    matches!((o(x), o(y), o(z)), (Some(ox), Some(oy), Some(oz)) if ox[0] == z && oy[2] == x && oz[1] == y)
}

fn kind_of(t: &Triangulation, [x, y, z]: [VertexId; 3]) -> TriangleKind {
    if t.ccw_next(x, y) == z {
        TriangleKind::Facial
    } else {
        TriangleKind::Separating
    }
}

/// Counterclockwise (flippable) and clockwise (floppable) cyclic triangles,
/// each sorted by vertex set.
pub fn flippable_triangles(t: &Triangulation, s: &SchnyderWood) -> (Vec<FlipEvent>, Vec<FlipEvent>) {
    let mut flips = Vec::new();
    let mut flops = Vec::new();
    for x in t.interior_vertices() {
        let ox = s.out(x).unwrap();
        if let Some(oy) = s.out(ox[0]) {
            let tri = [x, ox[0], oy[2]];
            if is_flippable(s, tri) {
                flips.push(event(t, tri, Direction::Flip));
            }
        }
        if let Some(oz) = s.out(ox[0]) {
            let tri = [x, oz[1], ox[0]];
            if is_floppable(s, tri) {
                flops.push(event(t, tri, Direction::Flop));
            }
        }
    }
    flips.sort_by_key(FlipEvent::sort_key);
    flops.sort_by_key(FlipEvent::sort_key);
    (flips, flops)
}

fn event(t: &Triangulation, triangle: [VertexId; 3], direction: Direction) -> FlipEvent {
    debug_assert_eq!(t.orient_ccw(triangle), triangle, "cyclic triangle must be ccw as named");
    FlipEvent { triangle, direction, kind: kind_of(t, triangle) }
}

fn check(t: &Triangulation, s: &SchnyderWood, e: &FlipEvent) -> Result<(), FlipError> {
    let fail = |reason| FlipError::InvalidFlip { triangle: e.triangle, direction: e.direction, reason };
    if e.triangle.iter().any(|&v| v >= t.n()) {
        return Err(fail("vertex out of range"));
    }
    let ok = match e.direction {
        Direction::Flip => is_flippable(s, e.triangle),
        Direction::Flop => is_floppable(s, e.triangle),
    };
    if !ok {
        return Err(fail("triangle is not cyclic in the required direction"));
    }
    if kind_of(t, e.triangle) != e.kind {
        return Err(fail("kind does not match the triangulation"));
    }
    Ok(())
}

/// Apply a flip or flop, recolouring the inside of a separating triangle.
pub fn apply_flip(t: &Triangulation, s: &SchnyderWood, e: &FlipEvent) -> Result<SchnyderWood, FlipError> {
    check(t, s, e)?;
    let [x, y, z] = e.triangle;
    let inner = match e.kind {
        TriangleKind::Facial => Vec::new(),
        TriangleKind::Separating => t.vertices_inside(e.triangle),
    };
    let mut s2 = s.clone();
    let out = s2.out_mut();
    let set = |out: &mut [Option<[VertexId; 3]>], v: VertexId, c: usize, w: VertexId| {
        out[v].as_mut().unwrap()[c] = w;
    };
    match e.direction {
        Direction::Flip => {
            set(out, x, 0, z);
            set(out, y, 2, x);
            set(out, z, 1, y);
            for b in inner {
                let o = out[b].as_mut().unwrap();
                *o = [o[2], o[0], o[1]];
            }
        }
        Direction::Flop => {
            set(out, x, 0, y);
            set(out, y, 2, z);
            set(out, z, 1, x);
            for b in inner {
                let o = out[b].as_mut().unwrap();
                *o = [o[1], o[2], o[0]];
            }
        }
    }
    Ok(s2)
}

/// The wood in which the event's triangle is counterclockwise.
pub(crate) fn ccw_state(t: &Triangulation, s: &SchnyderWood, e: &FlipEvent) -> Result<SchnyderWood, FlipError> {
    match e.direction {
        Direction::Flip => {
            check(t, s, e)?;
            Ok(s.clone())
        }
        Direction::Flop => apply_flip(t, s, e),
    }
}

/// Faces of `Delta_1(yz)`, `Delta_2(xy)`, `Delta_3(xz)` in a wood where
/// `(x, y, z)` is counterclockwise.
pub fn delta_regions(t: &Triangulation, s_ccw: &SchnyderWood, [x, y, z]: [VertexId; 3]) -> [Vec<FaceId>; 3] {
    let region = |p: VertexId, q: VertexId, c: Colour| {
        let mut barrier = HashSet::new();
        barrier.insert((p.min(q), p.max(q)));
        for v in [p, q] {
            for e in path(s_ccw, v, c).windows(2) {
                barrier.insert((e[0].min(e[1]), e[0].max(e[1])));
            }
        }
        // The region lies outside the triangle, to the left of q -> p.
        let mut faces = t.flood(t.left_face(q, p), |a, b| barrier.contains(&(a.min(b), a.max(b))), false);
        faces.sort_unstable();
        faces
    };
    [region(y, z, Colour::One), region(x, y, Colour::Two), region(z, x, Colour::Three)]
}

/// Region weights of the event, always measured in the counterclockwise state.
pub fn region_weights(t: &Triangulation, s: &SchnyderWood, w: &WeightDistribution, e: &FlipEvent) -> Result<RegionWeights, FlipError> {
    let s_ccw = ccw_state(t, s, e)?;
    Ok(region_weights_ccw(t, &s_ccw, w, e))
}

fn region_weights_ccw(t: &Triangulation, s_ccw: &SchnyderWood, w: &WeightDistribution, e: &FlipEvent) -> RegionWeights {
    let [d1, d2, d3] = delta_regions(t, s_ccw, e.triangle).map(|r| w.sum_over(&r));
    let w_c = w.sum_over(&t.faces_inside(e.triangle));
    RegionWeights { delta1: d1, delta2: d2, delta3: d3, w_c }
}

/// Coordinates after the event, updated in closed form from `d`, the drawing
/// of `(t, s, w)`.
pub fn predict_coords(
    t: &Triangulation,
    s: &SchnyderWood,
    w: &WeightDistribution,
    e: &FlipEvent,
    d: &Drawing,
) -> Result<Drawing, FlipError> {
    let s_ccw = ccw_state(t, s, e)?;
    let [x, y, z] = e.triangle;
    let rw = region_weights_ccw(t, &s_ccw, w, e);
    let sign = match e.direction {
        Direction::Flip => 1,
        Direction::Flop => -1,
    };
    let mut coords = d.coords().to_vec();
    let a1 = sign * (rw.delta1 + rw.w_c);
    let a2 = sign * (rw.delta2 + rw.w_c);
    let a3 = sign * (rw.delta3 + rw.w_c);
    for v in descendants(t, &s_ccw, x, Colour::One) {
        coords[v][1] -= a1;
        coords[v][2] += a1;
    }
    for v in descendants(t, &s_ccw, z, Colour::Two) {
        coords[v][0] += a2;
        coords[v][2] -= a2;
    }
    for v in descendants(t, &s_ccw, y, Colour::Three) {
        coords[v][0] -= a3;
        coords[v][1] += a3;
    }
    if e.kind == TriangleKind::Separating {
        let (sub, sub_wood) = restrict_wood(t, &s_ccw, e.triangle).map_err(|_| FlipError::InvalidFlip {
            triangle: e.triangle,
            direction: e.direction,
            reason: "triangle does not restrict to a sub-wood",
        })?;
        let sub_faces: Vec<i64> = sub
            .triangulation
            .faces()
            .iter()
            .map(|f| {
                let p = f.map(|v| sub.to_parent[v]);
                w.get(t.find_face(p[0], p[1], p[2]).unwrap())
            })
            .collect();
        let beta = draw(&sub.triangulation, &sub_wood, &WeightDistribution::new(sub_faces).unwrap());
        let base = [d.get(x)[0], d.get(z)[1], d.get(y)[2]];
        let (dl, dr) = ([rw.delta3, rw.delta1, rw.delta2], [rw.delta2, rw.delta3, rw.delta1]);
        for b in sub.triangulation.interior_vertices() {
            let be = beta.get(b);
            let (shift, inner) = match e.direction {
                Direction::Flip => (dr, [be[2], be[0], be[1]]),
                Direction::Flop => (dl, be),
            };
            coords[sub.to_parent[b]] = [0, 1, 2].map(|i| base[i] + shift[i] + inner[i]);
        }
    }
    Ok(Drawing::new(d.total(), coords))
}

/// [`predict_coords`] restricted to facial events.
pub fn predict_coords_facial(
    t: &Triangulation,
    s: &SchnyderWood,
    w: &WeightDistribution,
    e: &FlipEvent,
    d: &Drawing,
) -> Result<Drawing, FlipError> {
    if e.kind != TriangleKind::Facial {
        return Err(FlipError::InvalidFlip { triangle: e.triangle, direction: e.direction, reason: "not a facial triangle" });
    }
    predict_coords(t, s, w, e, d)
}

/// [`predict_coords`] restricted to separating events.
pub fn predict_coords_separating(
    t: &Triangulation,
    s: &SchnyderWood,
    w: &WeightDistribution,
    e: &FlipEvent,
    d: &Drawing,
) -> Result<Drawing, FlipError> {
    if e.kind != TriangleKind::Separating {
        return Err(FlipError::InvalidFlip { triangle: e.triangle, direction: e.direction, reason: "not a separating triangle" });
    }
    predict_coords(t, s, w, e, d)
}

/// Flip until no counterclockwise triangle remains, always taking the one
/// with the smallest sorted vertex triple. Returns the events and the sink.
pub fn maximal_flips(t: &Triangulation, s: &SchnyderWood) -> (Vec<FlipEvent>, SchnyderWood) {
    let mut s = s.clone();
    let mut events = Vec::new();
    loop {
        let (flips, _) = flippable_triangles(t, &s);
        let Some(&e) = flips.first() else {
            return (events, s);
        };
        s = apply_flip(t, &s, &e).expect("listed flip is valid");
        events.push(e);
    }
}

/// Like [`maximal_flips`], but each flip is chosen uniformly at random.
pub fn random_maximal_flips<R: Rng>(t: &Triangulation, s: &SchnyderWood, rng: &mut R) -> (Vec<FlipEvent>, SchnyderWood) {
    let mut s = s.clone();
    let mut events = Vec::new();
    loop {
        let (flips, _) = flippable_triangles(t, &s);
        let Some(&e) = flips.choose(rng) else {
            return (events, s);
        };
        s = apply_flip(t, &s, &e).expect("listed flip is valid");
        events.push(e);
    }
}

/// Events turning `a` into `b`: flips from `a` down to the sink, then the
/// flips from `b` to the sink undone in reverse order.
pub fn flip_sequence(t: &Triangulation, a: &SchnyderWood, b: &SchnyderWood) -> Result<Vec<FlipEvent>, FlipError> {
    let (mut down, sink_a) = maximal_flips(t, a);
    let (up, sink_b) = maximal_flips(t, b);
    if sink_a != sink_b {
        return Err(FlipError::DistinctSinks);
    }
    down.extend(up.into_iter().rev().map(FlipEvent::inverse));
    Ok(down)
}
