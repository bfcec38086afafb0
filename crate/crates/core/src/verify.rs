//! Exact planarity certificates for linear morphs, and brute-force wood
//! enumeration for small triangulations.

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drawing::Drawing;
use crate::schnyder::{validate_wood, SchnyderWood};
use crate::triangulation::{FaceId, Triangulation, VertexId};

/// Twice the signed area of face `(p, q, r)` as a polynomial in `t`, where each
/// vertex moves as `(1 - t) * start + t * end`. Returned as `(A, B, C)` for
/// `A t^2 + B t + C`, positive for a counterclockwise face (see
/// [`crate::drawing::face_area2`]).
pub fn area_polynomial(p0: [i64; 2], p1: [i64; 2], q0: [i64; 2], q1: [i64; 2], r0: [i64; 2], r1: [i64; 2]) -> (i128, i128, i128) {
    let sub = |a: [i64; 2], b: [i64; 2]| [a[0] as i128 - b[0] as i128, a[1] as i128 - b[1] as i128];
    let cross = |a: [i128; 2], b: [i128; 2]| a[0] * b[1] - a[1] * b[0];
    // Area is cross(r - p, q - p); both differences move linearly.
    let a0 = sub(r0, p0);
    let b0 = sub(q0, p0);
    let a1 = sub(r1, p1);
    let b1 = sub(q1, p1);
    let da = [a1[0] - a0[0], a1[1] - a0[1]];
    let db = [b1[0] - b0[0], b1[1] - b0[1]];
    (cross(da, db), cross(a0, db) + cross(da, b0), cross(a0, b0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Planar,
    CollapsedFace {
        face: FaceId,
        /// The first collapse time when it is rational. Otherwise the smallest
        /// multiple of `2^-k` (`k` = 40, 80 or 120) at which the face is
        /// degenerate or inverted; the collapse lies less than `2^-k` before it.
        #[serde(with = "ratio_string")]
        t_star: Ratio<i128>,
        /// Whether `t_star` is an exact root of the area polynomial.
        exact_root: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseCertificate {
    pub step: usize,
    pub verdict: Verdict,
    /// `(A, B, C)` for each interior face, in face order.
    pub per_face: Vec<(i128, i128, i128)>,
}

impl CollapseCertificate {
    pub fn is_planar(&self) -> bool {
        self.verdict == Verdict::Planar
    }
}

fn exact_sqrt(d: i128) -> Option<i128> {
    let r = d.sqrt();
    (r * r == d).then_some(r)
}

/// Decide whether `A t^2 + B t + C > 0` on all of `[0, 1]`; if not, return a
/// witness time and whether it is an exact root.
pub fn collapse_time(a: i128, b: i128, c: i128) -> Option<(Ratio<i128>, bool)> {
    let r = Ratio::new;
    if c <= 0 {
        return Some((r(0, 1), c == 0));
    }
    let at_one = a + b + c;
    // With f(0) > 0 the earliest root in (0, 1] is the smaller one when A > 0
    // and the only one in range otherwise.
    let earliest_root = || -> Option<Ratio<i128>> {
        if a == 0 {
            return (b != 0).then(|| r(-c, b));
        }
        let disc = b * b - 4 * a * c;
        let s = exact_sqrt(disc)?;
        let (x, y) = (r(-b - s, 2 * a), r(-b + s, 2 * a));
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let zero = r(0, 1);
        Some(if lo > zero { lo } else { hi })
    };
    if at_one <= 0 {
        return Some(match earliest_root() {
            Some(t) => (t, true),
            None => (first_nonpositive(a, b, c, r(1, 1)).unwrap_or(r(1, 1)), false),
        });
    }
    if a > 0 && -b > 0 && -b < 2 * a && b * b - 4 * a * c >= 0 {
        return Some(match earliest_root() {
            Some(t) => (t, true),
            None => {
                let v = r(-b, 2 * a);
                (first_nonpositive(a, b, c, v).unwrap_or(v), false)
            }
        });
    }
    None
}

/// The smallest `m / 2^k` in `(0, hi]` with `A t^2 + B t + C <= 0`, for the
/// first of `k = 40, 80, 120` that has one. Needs `C > 0` and the polynomial
/// non-positive from its first root up to `hi`.
fn first_nonpositive(a: i128, b: i128, c: i128, hi: Ratio<i128>) -> Option<Ratio<i128>> {
    let (a, b, c) = (BigInt::from(a), BigInt::from(b), BigInt::from(c));
    for k in [40u32, 80, 120] {
        let scale = BigInt::from(1) << k;
        // f(m / 2^k) * 4^k
        let f = |m: &BigInt| &a * m * m + &b * m * &scale + &c * &scale * &scale;
        let mut top = BigInt::from(*hi.numer()) * &scale / BigInt::from(*hi.denom());
        if f(&top) > BigInt::from(0) {
            continue;
        }
        let mut low = BigInt::from(0);
        while &top - &low > BigInt::from(1) {
            let mid = (&low + &top) >> 1;
            if f(&mid) > BigInt::from(0) {
                low = mid;
            } else {
                top = mid;
            }
        }
        return Some(Ratio::new(top.to_i128()?, scale.to_i128()?));
    }
    None
}

/// Certify the linear morph from `from` to `to` over the faces of `t`.
pub fn certify_linear_morph(t: &Triangulation, from: &Drawing, to: &Drawing, step: usize) -> CollapseCertificate {
    let pt = |d: &Drawing, v: VertexId| {
        let c = d.get(v);
        [c[0], c[1]]
    };
    let mut verdict = Verdict::Planar;
    let mut per_face = Vec::with_capacity(t.face_count());
    for (f, &[p, q, r]) in t.faces().iter().enumerate() {
        let poly = area_polynomial(pt(from, p), pt(to, p), pt(from, q), pt(to, q), pt(from, r), pt(to, r));
        if verdict == Verdict::Planar {
            if let Some((t_star, exact_root)) = collapse_time(poly.0, poly.1, poly.2) {
                verdict = Verdict::CollapsedFace { face: f, t_star, exact_root };
            }
        }
        per_face.push(poly);
    }
    CollapseCertificate { step, verdict, per_face }
}

/// Certify one step of a morph plan.
pub fn certify_step(t: &Triangulation, step: &crate::morph::MorphStep, id: usize) -> CollapseCertificate {
    certify_linear_morph(t, &step.from, &step.to, id)
}

pub mod ratio_string {
    //! Rationals as `"p/q"` strings.
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<i128>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<i128>, D::Error> {
        let s = String::deserialize(d)?;
        let (p, q) = s.split_once('/').unwrap_or((&s, "1"));
        let p = p.trim().parse().map_err(serde::de::Error::custom)?;
        let q: i128 = q.trim().parse().map_err(serde::de::Error::custom)?;
        if q == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Ratio::new(p, q))
    }
}

pub const ENUMERATION_LIMIT: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("wood enumeration is limited to {ENUMERATION_LIMIT} vertices, got {0}")]
    TooLarge(usize),
}

/// Every Schnyder wood of `t`, in a deterministic order.
///
/// Backtracks over the out-triples of interior vertices in breadth-first
/// order. Edges to exterior vertices are forced by the exterior rule and
/// every interior edge must be oriented exactly once; survivors are then
/// checked in full.
pub fn enumerate_woods(t: &Triangulation) -> Result<Vec<SchnyderWood>, EnumerationError> {
    if t.n() > ENUMERATION_LIMIT {
        return Err(EnumerationError::TooLarge(t.n()));
    }
    let mut order = Vec::new();
    let mut seen = vec![false; t.n()];
    for v in t.interior_vertices() {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let mut head = order.len();
        order.push(v);
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &w in t.rotation(u) {
                if !seen[w] && !t.is_exterior(w) {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
    }
    let mut out = vec![None; t.n()];
    let mut found = Vec::new();
    backtrack(t, &order, 0, &mut out, &mut found);
    Ok(found)
}

fn backtrack(t: &Triangulation, order: &[VertexId], k: usize, out: &mut Vec<Option<[VertexId; 3]>>, found: &mut Vec<SchnyderWood>) {
    if k == order.len() {
        let s = SchnyderWood::from_out(out.clone());
        if validate_wood(t, &s).is_ok() {
            found.push(s);
        }
        return;
    }
    let v = order[k];
    let rot = t.rotation(v);
    let d = rot.len();
    // allowed[i][j]: v may point at rot[i] with colour j. An assigned
    // interior neighbour that does not point at v must be pointed at.
    let mut allowed = vec![[true; 3]; d];
    let mut required = vec![false; d];
    for (i, &w) in rot.iter().enumerate() {
        match (t.exterior_index(w), out[w]) {
            (Some(e), _) => {
                allowed[i] = [e == 0, e == 1, e == 2];
                required[i] = true;
            }
            (None, Some(ow)) if ow.contains(&v) => allowed[i] = [false; 3],
            (None, Some(_)) => required[i] = true,
            (None, None) => {}
        }
    }
    let allowed = |i: usize, j: usize| allowed[i][j];
    let required = |i: usize| required[i];
    // Out-neighbours appear clockwise as o1, o2, o3.
    for i in 0..d {
        if !allowed(i, 0) {
            continue;
        }
        for di in 1..d {
            let j = (i + di) % d;
            if !allowed(j, 1) {
                continue;
            }
            for dk in di + 1..d {
                let l = (i + dk) % d;
                if !allowed(l, 2) {
                    continue;
                }
                let chosen = [i, j, l];
                if (0..d).any(|m| required(m) && !chosen.contains(&m)) {
                    continue;
                }
                out[v] = Some([rot[i], rot[j], rot[l]]);
                backtrack(t, order, k + 1, out, found);
            }
        }
    }
    out[v] = None;
}
