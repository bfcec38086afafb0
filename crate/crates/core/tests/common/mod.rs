#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use rand::seq::IndexedRandom;
use rand::Rng;
use schnyder_morph::flip::{apply_flip, flippable_triangles};
use schnyder_morph::generate::{random_triangulation, random_weights, random_wood, rng_from_seed};
use schnyder_morph::{compute_wood, SchnyderWood, Triangulation, VertexId, WeightDistribution};

/// Code of `t` rooted at the dart `a1 -> a2`: vertices are numbered in
/// breadth-first order, each scanning its rotation from the dart it was
/// reached by. Equal codes mean an orientation and root preserving
/// isomorphism.
pub fn rooted_code(t: &Triangulation) -> Vec<usize> {
    let [a1, a2, _] = t.exterior();
    let mut label = vec![usize::MAX; t.n()];
    let mut reference = vec![usize::MAX; t.n()];
    label[a1] = 0;
    reference[a1] = a2;
    let mut queue = VecDeque::from([a1]);
    let mut next = 1;
    let mut code = Vec::new();
    while let Some(u) = queue.pop_front() {
        let rot = t.rotation(u);
        let start = rot.iter().position(|&w| w == reference[u]).unwrap();
        code.push(usize::MAX);
        for k in 0..rot.len() {
            let w = rot[(start + k) % rot.len()];
            if label[w] == usize::MAX {
                label[w] = next;
                reference[w] = u;
                next += 1;
                queue.push_back(w);
            }
            code.push(label[w]);
        }
    }
    code
}

/// Flip the interior edge `uv`, if that keeps the graph simple.
pub fn flip_edge(t: &Triangulation, u: VertexId, v: VertexId) -> Option<Triangulation> {
    if t.is_exterior_edge(u, v) {
        return None;
    }
    let w = t.ccw_next(u, v);
    let x = t.cw_next(u, v);
    if t.has_edge(w, x) {
        return None;
    }
    let f = t.find_face(u, v, w)?;
    let g = t.find_face(v, u, x)?;
    // (u, v, w) and (v, u, x) are counterclockwise
    let mut faces = t.faces().to_vec();
    faces[f] = [x, v, w];
    faces[g] = [w, u, x];
    Triangulation::build(t.n(), t.exterior(), faces).ok()
}

fn stack(t: &Triangulation, f: usize) -> Triangulation {
    let v = t.n();
    let [a, b, c] = t.faces()[f];
    let mut faces = t.faces().to_vec();
    faces[f] = [v, a, b];
    faces.push([v, b, c]);
    faces.push([v, c, a]);
    Triangulation::build(v + 1, t.exterior(), faces).unwrap()
}

/// One representative per rooted triangulation on `n` vertices with the
/// exterior face fixed, for every `n` in `4..=max_n`. Built by stacking into
/// every face of the previous level, then closing under diagonal flips.
pub fn catalog(max_n: usize) -> Vec<Vec<Triangulation>> {
    let k4 = Triangulation::build(4, [0, 1, 2], vec![[3, 1, 0], [3, 2, 1], [3, 0, 2]]).unwrap();
    let mut levels = vec![vec![k4]];
    while levels.len() + 3 < max_n {
        let prev = levels.last().unwrap();
        let mut seen = HashSet::new();
        let mut level = Vec::new();
        let mut queue = VecDeque::new();
        for t in prev {
            for f in 0..t.face_count() {
                queue.push_back(stack(t, f));
            }
        }
        while let Some(t) = queue.pop_front() {
            if !seen.insert(rooted_code(&t)) {
                continue;
            }
            for (u, v) in t.interior_edges() {
                if let Some(s) = flip_edge(&t, u, v) {
                    if !seen.contains(&rooted_code(&s)) {
                        queue.push_back(s);
                    }
                }
            }
            level.push(t);
        }
        levels.push(level);
    }
    levels
}

/// One corpus instance: a triangulation with two woods and weights.
pub struct Instance {
    pub seed: u64,
    pub t: Triangulation,
    pub a: SchnyderWood,
    pub wa: WeightDistribution,
    pub b: SchnyderWood,
    pub wb: WeightDistribution,
}

/// Random weights totalling either `2n - 5` or `6n - 15`.
pub fn weights_either<R: Rng>(t: &Triangulation, rng: &mut R) -> WeightDistribution {
    let m = t.face_count() as i64;
    let total = if rng.random_bool(0.5) { m } else { 3 * m };
    random_weights(t, total, rng)
}

/// The wood reached from [`compute_wood`] by flopping until no clockwise
/// triangle is left.
pub fn top_wood(t: &Triangulation) -> SchnyderWood {
    let mut s = compute_wood(t);
    loop {
        let (_, flops) = flippable_triangles(t, &s);
        let Some(e) = flops.first() else {
            return s;
        };
        s = apply_flip(t, &s, e).unwrap();
    }
}

/// An instance with `n` vertices. Seeds `0 mod 4` have separating triangles
/// flipped away, seeds `1 mod 4` start from [`top_wood`].
pub fn instance(n: usize, seed: u64) -> Instance {
    let mut rng = rng_from_seed(seed);
    let mut t = random_triangulation(n, 2 * n, &mut rng);
    if seed.is_multiple_of(4) {
        t = reduce_separating(t, &mut rng);
    }
    let a = if seed % 4 == 1 { top_wood(&t) } else { random_wood(&t, 4 * n, &mut rng) };
    let b = random_wood(&t, 4 * n, &mut rng);
    let wa = weights_either(&t, &mut rng);
    let wb = weights_either(&t, &mut rng);
    Instance { seed, t, a, wa, b, wb }
}

/// Flip edges of separating triangles until none is left. Gives up after
/// `50 n` attempts and returns whatever it has.
pub fn reduce_separating<R: Rng>(t: Triangulation, rng: &mut R) -> Triangulation {
    let mut t = t;
    for _ in 0..50 * t.n() {
        let sep = t.separating_triangles();
        let Some(c) = sep.choose(rng) else {
            break;
        };
        let [x, y, z] = c.vertices;
        let edges = [(x, y), (y, z), (z, x)];
        let (u, v) = edges[rng.random_range(0..3)];
        if let Some(s) = flip_edge(&t, u, v) {
            t = s;
        }
    }
    t
}
