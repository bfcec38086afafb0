//! Seeded random instances.
//!
//! All randomness goes through [`ChaCha8Rng`], so a seed and
//! [`GENERATOR_VERSION`] fully determine every generated instance.

use std::collections::{HashMap, HashSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::drawing::WeightDistribution;
use crate::flip::{apply_flip, flippable_triangles};
use crate::schnyder::{compute_wood, SchnyderWood};
use crate::triangulation::{Triangulation, VertexId};

/// Bumped whenever generator output for a given seed changes.
pub const GENERATOR_VERSION: u32 = 1;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A triangulation on `n >= 4` vertices: stack vertices into uniformly random
/// faces of `K4`, then attempt `flips` random diagonal flips.
pub fn random_triangulation<R: Rng>(n: usize, flips: usize, rng: &mut R) -> Triangulation {
    assert!(n >= 4, "random triangulations need at least 4 vertices");
    let mut faces: Vec<[VertexId; 3]> = vec![[3, 1, 0], [3, 2, 1], [3, 0, 2]];
    for v in 4..n {
        let f = rng.random_range(0..faces.len());
        let [a, b, c] = faces[f];
        faces[f] = [v, a, b];
        faces.push([v, b, c]);
        faces.push([v, c, a]);
    }
    let mut dart: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    let mut adjacent: HashSet<(VertexId, VertexId)> = HashSet::new();
    let key = |u: VertexId, v: VertexId| (u.min(v), u.max(v));
    for (i, f) in faces.iter().enumerate() {
        for k in 0..3 {
            dart.insert((f[k], f[(k + 1) % 3]), i);
            adjacent.insert(key(f[k], f[(k + 1) % 3]));
        }
    }
    for _ in 0..flips {
        let fi = rng.random_range(0..faces.len());
        let k = rng.random_range(0..3);
        let face = faces[fi];
        let (u, v, w) = (face[k], face[(k + 1) % 3], face[(k + 2) % 3]);
        if u < 3 && v < 3 {
            continue;
        }
        let gi = dart[&(v, u)];
        let g = faces[gi];
        let x = g[(g.iter().position(|&p| p == u).unwrap() + 1) % 3];
        if adjacent.contains(&key(w, x)) {
            continue;
        }
        // (u, v, w) and (v, u, x) become (x, v, w) and (w, u, x).
        for (a, b) in [(u, v), (v, w), (w, u), (v, u), (u, x), (x, v)] {
            dart.remove(&(a, b));
        }
        adjacent.remove(&key(u, v));
        adjacent.insert(key(w, x));
        faces[fi] = [x, v, w];
        faces[gi] = [w, u, x];
        for i in [fi, gi] {
            let f = faces[i];
            for k in 0..3 {
                dart.insert((f[k], f[(k + 1) % 3]), i);
            }
        }
    }
    Triangulation::build(n, [0, 1, 2], faces).expect("generator keeps a valid triangulation")
}

/// [`random_triangulation`] with `2n` flip attempts, seeded.
pub fn generate(n: usize, seed: u64) -> Triangulation {
    random_triangulation(n, 2 * n, &mut rng_from_seed(seed))
}

/// A random walk of `steps` flips and flops starting at [`compute_wood`].
pub fn random_wood<R: Rng>(t: &Triangulation, steps: usize, rng: &mut R) -> SchnyderWood {
    let mut s = compute_wood(t);
    for _ in 0..steps {
        let (a, b) = flippable_triangles(t, &s);
        let all: Vec<_> = a.into_iter().chain(b).collect();
        let Some(e) = all.choose(rng) else {
            break;
        };
        s = apply_flip(t, &s, e).expect("listed flip is valid");
    }
    s
}

/// Positive integer weights summing to `total`.
pub fn random_weights<R: Rng>(t: &Triangulation, total: i64, rng: &mut R) -> WeightDistribution {
    let m = t.face_count();
    assert!(total >= m as i64, "total must allow weight 1 per face");
    let mut w = vec![1i64; m];
    for _ in 0..total - m as i64 {
        w[rng.random_range(0..m)] += 1;
    }
    WeightDistribution::new(w).unwrap()
}
