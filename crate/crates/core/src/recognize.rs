//! Recognizing weighted Schnyder drawings.
//!
//! Input coordinates are barycentric: exterior vertex `a_i` at `W * e_i` and
//! every vertex summing to `W`. The wood is read off the cone of each edge,
//! checked against the half-Theta-6 graph of the points, and the face weights
//! are the unique solution of the region equations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drawing::{draw, Drawing, WeightDistribution};
use crate::linalg::{bareiss_solve, reconstruct, solve_mod_p};
use crate::schnyder::{paths_and_regions, validate_wood, SchnyderWood, WoodFile, WoodViolation};
use crate::triangulation::{FaceId, Triangulation, VertexId};

pub use num_rational::BigRational;

pub type Point = [BigRational; 3];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecognizeError {
    #[error("expected {expected} points, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("the total must be positive")]
    NonPositiveTotal,
    #[error("coordinates of vertex {0} do not sum to the total")]
    NotBarycentric(VertexId),
    #[error("exterior vertex {0} is not at its corner")]
    ExteriorMisplaced(VertexId),
    #[error("exterior vertices are collinear")]
    DegenerateHull,
    #[error("coordinates too large for exact fixed-width arithmetic")]
    TooLarge,
}

/// Why the edge classification failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("edge ({}, {}) has an endpoint on a cone boundary", .0[0], .0[1])]
    DegenerateCone([VertexId; 2]),
    #[error("edge ({}, {}) is not in both the drawing and its half-Theta-6 graph", .0[0], .0[1])]
    WoodMismatch([VertexId; 2]),
    #[error("classified edges are not a Schnyder wood: {0}")]
    InvalidWood(WoodViolation),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("the region equations have no solution")]
    InconsistentSystem,
    #[error("the region equations are singular")]
    Singular,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    WeightedSchnyder {
        wood: WoodFile,
    },
    WoodMismatch {
        edge: [VertexId; 2],
    },
    NonPositiveWeight {
        face: FaceId,
        #[serde(with = "big_ratio_string")]
        value: BigRational,
    },
    DegenerateCone {
        edge: [VertexId; 2],
    },
    InvalidWood {
        reason: String,
    },
    InconsistentSystem,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecognitionResult {
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Face weights whenever the system was solved, as `"p/q"` strings.
    #[serde(with = "big_ratio_vec", default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<BigRational>>,
}

impl RecognitionResult {
    pub fn is_weighted_schnyder(&self) -> bool {
        matches!(self.verdict, Verdict::WeightedSchnyder { .. })
    }

    /// Integer weights with total `total`, if every recovered weight is a
    /// positive integer.
    pub fn integer_weights(&self) -> Option<WeightDistribution> {
        let w = self.weights.as_ref()?;
        let ints: Option<Vec<i64>> = w.iter().map(|x| x.is_integer().then(|| x.to_integer().to_i64())?).collect();
        WeightDistribution::new(ints?).ok()
    }
}

pub mod big_ratio_string {
    //! `BigRational` as a `"p/q"` string.
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

mod big_ratio_vec {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigRational>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.collect_seq(v.iter().map(|r| format!("{}/{}", r.numer(), r.denom()))),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigRational>>, D::Error> {
        let v = Option::<Vec<String>>::deserialize(d)?;
        v.map(|v| v.iter().map(|s| super::parse_rational(s)).collect()).transpose().map_err(serde::de::Error::custom)
    }
}

/// Parse `"p/q"`, `"p"` or a finite decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let int = |t: &str| t.trim().parse::<BigInt>().map_err(|e| format!("{s:?}: {e}"));
    if let Some((p, q)) = s.split_once('/') {
        let q = int(q)?;
        if q.is_zero() {
            return Err(format!("{s:?}: zero denominator"));
        }
        return Ok(BigRational::new(int(p)?, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let digits = format!("{whole}{frac}");
        let scale = BigInt::from(10).pow(frac.len() as u32);
        return Ok(BigRational::new(int(&digits)?, scale));
    }
    Ok(BigRational::from_integer(int(s)?))
}

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// The exact barycentric coordinates of an integer drawing.
pub fn rational_coords(d: &Drawing) -> (BigRational, Vec<Point>) {
    let coords = d.coords().iter().map(|c| c.map(q)).collect();
    (q(d.total()), coords)
}

/// Map Cartesian points affinely so that the exterior vertices land on
/// `(W,0,0)`, `(0,W,0)`, `(0,0,W)`.
pub fn normalize_cartesian(t: &Triangulation, points: &[[BigRational; 2]], total: &BigRational) -> Result<Vec<Point>, RecognizeError> {
    if points.len() != t.n() {
        return Err(RecognizeError::CountMismatch { expected: t.n(), found: points.len() });
    }
    let cross = |o: &[BigRational; 2], a: &[BigRational; 2], b: &[BigRational; 2]| {
        (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
    };
    let [p1, p2, p3] = t.exterior().map(|a| &points[a]);
    let det = cross(p1, p2, p3);
    if det.is_zero() {
        return Err(RecognizeError::DegenerateHull);
    }
    Ok(points.iter().map(|p| [cross(p, p2, p3), cross(p1, p, p3), cross(p1, p2, p)].map(|a| a * total / &det)).collect())
}

/// Integer coordinates `L * coords` with `L` the least common denominator.
struct Scaled {
    total: i128,
    coords: Vec<[i128; 3]>,
    scale: BigInt,
}

fn check_input(t: &Triangulation, total: &BigRational, coords: &[Point]) -> Result<Scaled, RecognizeError> {
    if coords.len() != t.n() {
        return Err(RecognizeError::CountMismatch { expected: t.n(), found: coords.len() });
    }
    if !total.is_positive() {
        return Err(RecognizeError::NonPositiveTotal);
    }
    for (v, c) in coords.iter().enumerate() {
        if &(&c[0] + &c[1] + &c[2]) != total {
            return Err(RecognizeError::NotBarycentric(v));
        }
    }
    for (i, &a) in t.exterior().iter().enumerate() {
        if &coords[a][i] != total {
            return Err(RecognizeError::ExteriorMisplaced(a));
        }
    }
    let mut scale = total.denom().clone();
    for c in coords {
        for x in c {
            scale = scale.lcm(x.denom());
        }
    }
    let to_int = |x: &BigRational| (x * &scale).to_integer().to_i128().filter(|v| v.abs() < 1 << 100);
    let total_int = to_int(total).ok_or(RecognizeError::TooLarge)?;
    let mut ints = Vec::with_capacity(coords.len());
    for c in coords {
        let mut p = [0i128; 3];
        for i in 0..3 {
            p[i] = to_int(&c[i]).ok_or(RecognizeError::TooLarge)?;
        }
        ints.push(p);
    }
    Ok(Scaled { total: total_int, coords: ints, scale })
}

/// `Some(c)` if `d` is in the open cone of colour `c`: positive in `c` and
/// negative in the other two coordinates.
fn cone(d: [i128; 3]) -> Option<usize> {
    (0..3).find(|&i| d[i] > 0 && d[(i + 1) % 3] < 0 && d[(i + 2) % 3] < 0)
}

fn diff(a: [i128; 3], b: [i128; 3]) -> [i128; 3] {
    [b[0] - a[0], b[1] - a[1], b[2] - a[2]]
}

fn classify_scaled(t: &Triangulation, p: &[[i128; 3]]) -> Result<SchnyderWood, ClassifyError> {
    let n = t.n();
    let mut heads: Vec<[Vec<VertexId>; 3]> = vec![Default::default(); n];
    for (u, v) in t.interior_edges() {
        let d = diff(p[u], p[v]);
        if d.contains(&0) {
            return Err(ClassifyError::DegenerateCone([u, v]));
        }
        match cone(d) {
            Some(i) => heads[u][i].push(v),
            None => heads[v][cone(d.map(|x| -x)).unwrap()].push(u),
        }
    }
    let mut out = vec![None; n];
    for u in t.interior_vertices() {
        let mut o = [0; 3];
        for i in 0..3 {
            // nearest point of the closed cone, measured along coordinate i
            let mut best: Option<(i128, VertexId)> = None;
            let mut tie = None;
            for x in 0..n {
                let d = diff(p[u], p[x]);
                if x == u || d[i] <= 0 && d != [0; 3] || d[(i + 1) % 3] > 0 || d[(i + 2) % 3] > 0 {
                    continue;
                }
                match best {
                    Some((b, _)) if b < d[i] => {}
                    Some((b, _)) if b == d[i] => tie = Some(x),
                    _ => {
                        best = Some((d[i], x));
                        tie = None;
                    }
                }
            }
            let Some((_, x)) = best else {
                return Err(ClassifyError::WoodMismatch([u, u]));
            };
            if tie.is_some() || cone(diff(p[u], p[x])) != Some(i) {
                return Err(ClassifyError::DegenerateCone([u, tie.unwrap_or(x)]));
            }
            if heads[u][i] != [x] {
                let witness = heads[u][i].iter().copied().find(|&h| h != x).unwrap_or(x);
                return Err(ClassifyError::WoodMismatch([u, witness]));
            }
            o[i] = x;
        }
        out[u] = Some(o);
    }
    let s = SchnyderWood::from_out(out);
    validate_wood(t, &s).map_err(ClassifyError::InvalidWood)?;
    Ok(s)
}

/// The wood whose cones match the drawing.
pub fn classify_edges(
    t: &Triangulation,
    total: &BigRational,
    coords: &[Point],
) -> Result<Result<SchnyderWood, ClassifyError>, RecognizeError> {
    let scaled = check_input(t, total, coords)?;
    Ok(classify_scaled(t, &scaled.coords))
}

/// Region rows: `R_1(v)` and `R_2(v)` for every interior vertex, then the
/// all-faces row. The third region of each vertex is implied by the total.
struct System {
    regions: Vec<(VertexId, [Vec<FaceId>; 3])>,
    faces: usize,
}

impl System {
    fn new(t: &Triangulation, s: &SchnyderWood) -> Self {
        let regions = t.interior_vertices().map(|v| (v, paths_and_regions(t, s, v).regions)).collect();
        System { regions, faces: t.face_count() }
    }

    fn square(&self, sc: &Scaled) -> (Vec<Vec<i64>>, Vec<BigInt>) {
        let mut a = Vec::with_capacity(self.faces);
        let mut b = Vec::with_capacity(self.faces);
        for (v, r) in &self.regions {
            for (i, region) in r.iter().enumerate().take(2) {
                let mut row = vec![0; self.faces];
                for &f in region {
                    row[f] = 1;
                }
                a.push(row);
                b.push(BigInt::from(sc.coords[*v][i]));
            }
        }
        a.push(vec![1; self.faces]);
        b.push(BigInt::from(sc.total));
        (a, b)
    }

    /// Every region equation, checked exactly for `y = L * w`.
    fn satisfied_by(&self, sc: &Scaled, y: &[BigRational]) -> bool {
        let den = y.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Option<Vec<i128>> = y.iter().map(|x| (x * &den).to_integer().to_i128().filter(|v| v.abs() < 1 << 100)).collect();
        match (ints, den.to_i128().filter(|d| d.abs() < 1 << 20)) {
            (Some(z), Some(d)) => {
                let sum = |faces: &[FaceId]| faces.iter().try_fold(0i128, |acc, &f| acc.checked_add(z[f]));
                let check = |faces: &[FaceId], rhs: i128| sum(faces).zip(rhs.checked_mul(d)).map(|(l, r)| l == r);
                let all: Vec<FaceId> = (0..self.faces).collect();
                check(&all, sc.total) == Some(true)
                    && self.regions.iter().all(|(v, r)| (0..3).all(|i| check(&r[i], sc.coords[*v][i]) == Some(true)))
            }
            _ => {
                let sum = |faces: &[FaceId]| faces.iter().fold(BigRational::zero(), |acc, &f| acc + &y[f]);
                let big = |x: i128| BigRational::from_integer(BigInt::from(x));
                sum(&(0..self.faces).collect::<Vec<_>>()) == big(sc.total)
                    && self.regions.iter().all(|(v, r)| (0..3).all(|i| sum(&r[i]) == big(sc.coords[*v][i])))
            }
        }
    }
}

fn unscale(y: Vec<BigRational>, scale: &BigInt) -> Vec<BigRational> {
    let s = BigRational::from_integer(scale.clone());
    y.into_iter().map(|x| x / &s).collect()
}

fn solve_scaled(sys: &System, sc: &Scaled) -> Result<Vec<BigRational>, SolveError> {
    let (a, b) = sys.square(sc);
    if let Some(m) = solve_mod_p(&a, &b) {
        if let Some(y) = m.into_iter().map(reconstruct).collect::<Option<Vec<_>>>() {
            if sys.satisfied_by(sc, &y) {
                return Ok(unscale(y, &sc.scale));
            }
        }
    }
    let order: Vec<usize> = (0..sys.faces).collect();
    let y = bareiss_solve(&a, &b, &order).ok_or(SolveError::Singular)?;
    if sys.satisfied_by(sc, &y) {
        Ok(unscale(y, &sc.scale))
    } else {
        Err(SolveError::InconsistentSystem)
    }
}

/// The unique face weights realizing `coords` over wood `s`; weights may be
/// zero or negative.
pub fn solve_weights(
    t: &Triangulation,
    s: &SchnyderWood,
    total: &BigRational,
    coords: &[Point],
) -> Result<Result<Vec<BigRational>, SolveError>, RecognizeError> {
    let sc = check_input(t, total, coords)?;
    Ok(solve_scaled(&System::new(t, s), &sc))
}

/// [`solve_weights`] by fraction-free elimination only, pivoting on faces in
/// increasing or decreasing id order.
pub fn solve_weights_exact(
    t: &Triangulation,
    s: &SchnyderWood,
    total: &BigRational,
    coords: &[Point],
    reversed: bool,
) -> Result<Result<Vec<BigRational>, SolveError>, RecognizeError> {
    let sc = check_input(t, total, coords)?;
    let sys = System::new(t, s);
    let (a, b) = sys.square(&sc);
    let mut order: Vec<usize> = (0..sys.faces).collect();
    if reversed {
        order.reverse();
    }
    Ok(match bareiss_solve(&a, &b, &order) {
        None => Err(SolveError::Singular),
        Some(y) if sys.satisfied_by(&sc, &y) => Ok(unscale(y, &sc.scale)),
        Some(_) => Err(SolveError::InconsistentSystem),
    })
}

/// Whether `coords` is a weighted Schnyder drawing of `t`, and with which wood
/// and weights.
pub fn recognize(t: &Triangulation, total: &BigRational, coords: &[Point]) -> Result<RecognitionResult, RecognizeError> {
    let sc = check_input(t, total, coords)?;
    let verdict = |verdict| RecognitionResult { verdict, weights: None };
    let s = match classify_scaled(t, &sc.coords) {
        Ok(s) => s,
        Err(ClassifyError::DegenerateCone(edge)) => return Ok(verdict(Verdict::DegenerateCone { edge })),
        Err(ClassifyError::WoodMismatch(edge)) => return Ok(verdict(Verdict::WoodMismatch { edge })),
        Err(ClassifyError::InvalidWood(v)) => return Ok(verdict(Verdict::InvalidWood { reason: v.to_string() })),
    };
    let w = match solve_scaled(&System::new(t, &s), &sc) {
        Ok(w) => w,
        Err(_) => return Ok(verdict(Verdict::InconsistentSystem)),
    };
    if let Some(face) = w.iter().position(|x| !x.is_positive()) {
        return Ok(RecognitionResult { verdict: Verdict::NonPositiveWeight { face, value: w[face].clone() }, weights: Some(w) });
    }
    assert!(reproduces(t, &s, &w, total, coords), "recovered weights do not redraw the input");
    Ok(RecognitionResult { verdict: Verdict::WeightedSchnyder { wood: s.into() }, weights: Some(w) })
}

/// `draw(t, s, w)` equals `coords` after scaling both to integers. Weights too
/// large for the integer drawing are accepted on the strength of the exact
/// equation check.
fn reproduces(t: &Triangulation, s: &SchnyderWood, w: &[BigRational], total: &BigRational, coords: &[Point]) -> bool {
    let den = w.iter().fold(total.denom().clone(), |acc, x| acc.lcm(x.denom()));
    let den_q = BigRational::from_integer(den);
    let ints: Option<Vec<i64>> = w.iter().map(|x| (x * &den_q).to_integer().to_i64()).collect();
    let Some(ints) = ints.filter(|v| v.iter().try_fold(0i64, |a, &x| a.checked_add(x)).is_some()) else {
        return true;
    };
    let Ok(dist) = WeightDistribution::new(ints) else {
        return false;
    };
    let d = draw(t, s, &dist);
    &den_q * total == q(d.total()) && coords.iter().zip(d.coords()).all(|(c, e)| (0..3).all(|i| &c[i] * &den_q == q(e[i])))
}
