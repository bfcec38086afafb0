//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use schnyder_morph::drawing::draw_by_regions;
use schnyder_morph::flip::{apply_flip, flippable_triangles, maximal_flips, predict_coords, random_maximal_flips, FlipEvent};
use schnyder_morph::generate::{random_triangulation, random_weights, random_wood, rng_from_seed};
use schnyder_morph::instances::{k4, nonpositive_witness, octahedron, stacked_octahedron, witness_nonpositive_drawing, WITNESS_POINTS};
use schnyder_morph::morph::morph_separating_flip;
use schnyder_morph::recognize::{self, normalize_cartesian, parse_rational, rational_coords};
use schnyder_morph::schnyder::WoodFile;
use schnyder_morph::triangulation::TriangleKind;
use schnyder_morph::verify::{certify_linear_morph, certify_step, enumerate_woods, Verdict};
use schnyder_morph::{draw, is_planar, plan_morph, validate_wood, Drawing, SchnyderWood, Triangulation, WeightDistribution};

const CORPUS: u64 = 500;
const RECOGNITION_SAMPLES: u64 = 10_000;
const RUNS_PER_WOOD: usize = 50;

struct Line {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
    /// Whether a failure here is a documented deviation.
    known_failure: bool,
}

fn par_map<T: Send>(count: u64, f: impl Fn(u64) -> T + Sync) -> Vec<T> {
    let threads = thread::available_parallelism().map_or(4, |n| n.get());
    let f = &f;
    let mut all: Vec<(u64, T)> = thread::scope(|sc| {
        let handles: Vec<_> =
            (0..threads).map(|k| sc.spawn(move || (k as u64..count).step_by(threads).map(|i| (i, f(i))).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    all.sort_by_key(|p| p.0);
    all.into_iter().map(|p| p.1).collect()
}

fn first<T: Clone>(xs: impl IntoIterator<Item = Option<T>>) -> Option<T> {
    xs.into_iter().flatten().next()
}

// ---------------------------------------------------------------------------
// corpus: criteria 1 to 5 and 7

#[derive(Default)]
struct Report {
    n: usize,
    steps: usize,
    drawings: usize,
    flips: usize,
    four_connected: bool,
    /// Longest maximal flip sequence and the dual distance sum, 4-connected only.
    flip_bound: Option<(usize, u64)>,
    /// First failure per criterion 1, 2, 3, 4, 5, 7.
    fail: [Option<String>; 6],
}

fn set(slot: &mut Option<String>, msg: impl FnOnce() -> String) {
    if slot.is_none() {
        *slot = Some(msg());
    }
}

/// Strictly positive area of every face halfway through the step, from
/// doubled coordinates.
fn midpoint_positive(t: &Triangulation, from: &Drawing, to: &Drawing) -> bool {
    let mid = |v: usize| {
        let (a, b) = (from.get(v), to.get(v));
        [(a[0] + b[0]) as i128, (a[1] + b[1]) as i128]
    };
    t.faces().iter().all(|&[p, q, r]| {
        let (p, q, r) = (mid(p), mid(q), mid(r));
        (r[0] - p[0]) * (q[1] - p[1]) - (r[1] - p[1]) * (q[0] - p[0]) > 0
    })
}

fn baseline(t: &Triangulation, s: &SchnyderWood) -> Option<String> {
    let d = draw(t, s, &WeightDistribution::uniform(t, 1));
    let small = 2 * t.n() as i64 - 5;
    if d.total() != small || !d.within_grid(small) {
        return Some("uniform drawing leaves the (2n-5) grid".into());
    }
    if !is_planar(t, &d) {
        return Some("uniform drawing is not planar".into());
    }
    if !d.is_injective() {
        return Some("uniform drawing is not injective".into());
    }
    None
}

fn check_instance(i: u64) -> Report {
    let mut rng = rng_from_seed(0xACCE_0000 + i);
    let n = rng.random_range(10..=200usize);
    let inst = common::instance(n, i);
    let t = &inst.t;
    let mut r = Report { n, four_connected: t.is_four_connected(), ..Report::default() };
    let [c1, c2, c3, c4, c5, c7] = &mut r.fail;

    let plan = match plan_morph(t, &inst.a, &inst.wa, &inst.b, &inst.wb) {
        Ok(p) => p,
        Err(e) => {
            set(c1, || format!("seed {i}: planning failed: {e}"));
            set(c2, || format!("seed {i}: planning failed: {e}"));
            return r;
        }
    };
    r.steps = plan.steps.len();

    // 1: grid bound, chaining and endpoints
    let big = 6 * n as i64 - 15;
    for (k, d) in plan.drawings().enumerate() {
        r.drawings += 1;
        if d.total() != big || !d.is_barycentric() || !d.within_grid(big) {
            set(c1, || format!("seed {i}: drawing {k} leaves [0, {big}]^2"));
        }
    }
    if plan.steps.windows(2).any(|p| p[0].to != p[1].from) {
        set(c1, || format!("seed {i}: consecutive steps do not chain"));
    }
    let start = draw(t, &inst.a, &inst.wa.scaled(plan.scale[0]));
    let end = draw(t, &inst.b, &inst.wb.scaled(plan.scale[1]));
    if plan.steps[0].from != start || plan.steps.last().unwrap().to != end {
        set(c1, || format!("seed {i}: plan endpoints differ from the input drawings"));
    }

    // 2: certificates, recomputed, plus a midpoint spot check
    for (k, st) in plan.steps.iter().enumerate() {
        let fresh = certify_step(t, st, k);
        if !fresh.is_planar() || !plan.certificates[k].is_planar() {
            set(c2, || format!("seed {i}: step {k} is {:?}", fresh.verdict));
        }
        if !midpoint_positive(t, &st.from, &st.to) {
            set(c2, || format!("seed {i}: step {k} has a non-positive face at t = 1/2"));
        }
    }

    // 3: step count and the 4-connected flip bound
    if plan.steps.len() > 8 * n * n {
        set(c3, || format!("seed {i}: {} steps > 8n^2 = {}", plan.steps.len(), 8 * n * n));
    }
    if r.four_connected {
        let bound = t.dual_distance_sum();
        let mut longest = 0;
        for s in [&inst.a, &inst.b, &common::top_wood(t)] {
            longest = longest.max(maximal_flips(t, s).0.len());
            longest = longest.max(random_maximal_flips(t, s, &mut rng).0.len());
        }
        if longest as u64 > bound {
            set(c3, || format!("seed {i}: maximal flip sequence {longest} > dual distance sum {bound}"));
        }
        r.flip_bound = Some((longest, bound));
    }

    // 4, 5, 7: replay the flip sequence
    let w3 = WeightDistribution::uniform(t, 3);
    let wr = random_weights(t, rng.random_range(t.face_count() as i64..=4 * t.face_count() as i64), &mut rng);
    let mut s = inst.a.clone();
    if let Some(m) = baseline(t, &s) {
        set(c7, || format!("seed {i}: {m}"));
    }
    let mut before = [draw(t, &s, &w3), draw(t, &s, &wr)];
    for (k, e) in plan.events.iter().enumerate() {
        r.flips += 1;
        let s2 = match apply_flip(t, &s, e) {
            Ok(s2) => s2,
            Err(err) => {
                set(c5, || format!("seed {i}: {err}"));
                return r;
            }
        };
        if let Err(v) = validate_wood(t, &s2) {
            set(c5, || format!("seed {i}: {e:?} gives an invalid wood: {v}"));
        }
        if apply_flip(t, &s2, &e.inverse()).as_ref() != Ok(&s) {
            set(c5, || format!("seed {i}: {e:?} is not undone by its inverse"));
        }
        let after = [draw(t, &s2, &w3), draw(t, &s2, &wr)];
        // region sums face by face, too slow for every flip of a large plan
        if (n <= 40 || k < 3) && after[1] != draw_by_regions(t, &s2, &wr) {
            set(c4, || format!("seed {i}: drawing after {e:?} differs from its region sums"));
        }
        for (w, (b, a)) in [&w3, &wr].into_iter().zip(before.iter().zip(&after)) {
            if predict_coords(t, &s, w, e, b).as_ref() != Ok(a) {
                set(c4, || format!("seed {i}: prediction for {e:?} differs from recomputation"));
            }
            if predict_coords(t, &s2, w, &e.inverse(), a).as_ref() != Ok(b) {
                set(c4, || format!("seed {i}: prediction for the inverse of {e:?} differs"));
            }
        }
        if e.kind == TriangleKind::Separating {
            // the rebalanced weights used by the plan
            match morph_separating_flip(t, &s, &w3, e) {
                Ok(three) => {
                    let balanced_after = &three[1].to;
                    let expect = draw(t, &s2, &schnyder_morph::morph::rebalance_weights(t, &s, &w3, e).unwrap());
                    if *balanced_after != expect {
                        set(c4, || format!("seed {i}: rebalanced prediction for {e:?} differs"));
                    }
                }
                Err(err) => set(c4, || format!("seed {i}: {err}")),
            }
        }
        if let Some(m) = baseline(t, &s2) {
            set(c7, || format!("seed {i}: {m}"));
        }
        before = after;
        s = s2;
    }
    if s != inst.b {
        set(c5, || format!("seed {i}: flip sequence does not end at the target wood"));
    }
    r
}

fn corpus_lines() -> Vec<Line> {
    let start = Instant::now();
    let reports = par_map(CORPUS, check_instance);
    let elapsed = start.elapsed();
    let drawings: usize = reports.iter().map(|r| r.drawings).sum();
    let flips: usize = reports.iter().map(|r| r.flips).sum();
    let n_min = reports.iter().map(|r| r.n).min().unwrap();
    let n_max = reports.iter().map(|r| r.n).max().unwrap();
    let worst = reports.iter().map(|r| r.steps as f64 / (r.n * r.n) as f64).fold(0.0, f64::max);
    let max_steps = reports.iter().map(|r| r.steps).max().unwrap();
    let four: Vec<_> = reports.iter().filter_map(|r| r.flip_bound).collect();
    let tightest = four.iter().map(|&(l, b)| l as f64 / b as f64).fold(0.0, f64::max);
    let fail = |k: usize| first(reports.iter().map(|r| r.fail[k].clone()));
    let line = |id, name, k: usize, ok_detail: String| {
        let f = fail(k);
        Line { id, name, pass: f.is_none(), detail: f.unwrap_or(ok_detail), known_failure: false }
    };
    vec![
        line(1, "grid bound", 0, format!("{CORPUS} plans, n {n_min}..{n_max}, {drawings} drawings in [0, 6n-15]^2 ({elapsed:.1?})")),
        line(2, "planarity of every step", 1, format!("{} certified steps", drawings - CORPUS as usize)),
        line(
            3,
            "step count",
            2,
            format!("max {max_steps} steps, max steps/n^2 = {worst:.3}; {} 4-connected, max sequence/dual sum = {tightest:.3}", four.len()),
        ),
        line(4, "closed-form coordinate updates", 3, format!("{flips} flips, both directions, two weightings each")),
        line(5, "flip validity", 4, format!("{flips} flips validated, each undone by its inverse")),
        line(7, "schnyder baseline", 5, format!("{} woods drawn with uniform weight 1", flips + CORPUS as usize)),
    ]
}

// ---------------------------------------------------------------------------
// criterion 6

fn confluence_line() -> Line {
    let levels = common::catalog(9);
    let all: Vec<&Triangulation> = levels.iter().flatten().collect();
    let results = par_map(all.len() as u64, |k| {
        let t = all[k as usize];
        let woods = enumerate_woods(t).unwrap();
        let sink = maximal_flips(t, &woods[0]).1;
        if !flippable_triangles(t, &sink).0.is_empty() {
            return Err(format!("triangulation {k}: sink still has a flippable triangle"));
        }
        let mut rng = rng_from_seed(0x6000 + k);
        for (j, s) in woods.iter().enumerate() {
            for _ in 0..RUNS_PER_WOOD {
                if random_maximal_flips(t, s, &mut rng).1 != sink {
                    return Err(format!("triangulation {k}, wood {j}: a random run ends elsewhere"));
                }
            }
        }
        Ok(woods.len())
    });
    let fail = first(results.iter().map(|r| r.clone().err()));
    let woods: usize = results.iter().filter_map(|r| r.clone().ok()).sum();
    Line {
        id: 6,
        name: "lattice confluence",
        pass: fail.is_none(),
        detail: fail.unwrap_or(format!(
            "{} triangulations with n <= 9, {woods} woods, {} random runs, one sink each",
            all.len(),
            woods * RUNS_PER_WOOD
        )),
        known_failure: false,
    }
}

// ---------------------------------------------------------------------------
// criterion 8

fn big(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn recognition_sample(k: u64) -> Result<usize, String> {
    let mut rng = rng_from_seed(0x8000_0000 + k);
    let n = rng.random_range(4..=100usize);
    let t = random_triangulation(n, rng.random_range(0..=2 * n), &mut rng);
    let s = random_wood(&t, 3 * n, &mut rng);
    let m = t.face_count() as i64;
    let w = random_weights(&t, rng.random_range(m..=4 * m), &mut rng);
    let (total, coords) = rational_coords(&draw(&t, &s, &w));
    let r = recognize::recognize(&t, &total, &coords).map_err(|e| format!("sample {k}: {e}"))?;
    let recognize::Verdict::WeightedSchnyder { wood } = &r.verdict else {
        return Err(format!("sample {k} (n = {n}): {:?}", r.verdict));
    };
    if SchnyderWood::from_labels(&t, &wood.edges).as_ref() != Ok(&s) {
        return Err(format!("sample {k}: recovered a different wood"));
    }
    let expect: Vec<BigRational> = w.weights().iter().map(|&x| big(x)).collect();
    if r.weights.as_ref() != Some(&expect) {
        return Err(format!("sample {k}: recovered different weights"));
    }
    Ok(n)
}

fn recognition_line() -> Line {
    let results = par_map(RECOGNITION_SAMPLES, recognition_sample);
    let fail = first(results.iter().map(|r| r.clone().err()));
    let n_max = results.iter().filter_map(|r| r.clone().ok()).max().unwrap_or(0);

    let t = nonpositive_witness();
    let pts: Vec<[BigRational; 2]> = WITNESS_POINTS.iter().map(|p| p.map(|s| parse_rational(s).unwrap())).collect();
    let one = big(1);
    let literal = recognize::recognize(&t, &one, &normalize_cartesian(&t, &pts, &one).unwrap()).unwrap();
    let (total, coords) = rational_coords(&witness_nonpositive_drawing());
    let frozen = recognize::recognize(&t, &total, &coords).unwrap();
    let nonpositive = |v: &recognize::Verdict| matches!(v, recognize::Verdict::NonPositiveWeight { .. });

    let round_trip = format!("{RECOGNITION_SAMPLES} round trips exact (n <= {n_max})");
    let witness =
        format!("hand-placed coordinates give {:?}; frozen drawing of the same triangulation gives {:?}", literal.verdict, frozen.verdict);
    let pass = fail.is_none() && nonpositive(&literal.verdict);
    let known = fail.is_none() && literal.verdict == recognize::Verdict::WoodMismatch { edge: [3, 1] } && nonpositive(&frozen.verdict);
    Line {
        id: 8,
        name: "recognition round-trip",
        pass,
        detail: match fail {
            Some(f) => format!("{f}; {witness}"),
            None => format!("{round_trip}; {witness}"),
        },
        known_failure: known,
    }
}

// ---------------------------------------------------------------------------
// criterion 9

fn separating_line() -> Line {
    let data: serde_json::Value = serde_json::from_str(include_str!("data/separating_witness.json")).unwrap();
    let t: Triangulation = serde_json::from_value(data["triangulation"].clone()).unwrap();
    let wood: WoodFile = serde_json::from_value(data["wood"].clone()).unwrap();
    let s = SchnyderWood::from_labels(&t, &wood.edges).unwrap();
    let e: FlipEvent = serde_json::from_value(data["event"].clone()).unwrap();
    let w3 = WeightDistribution::uniform(&t, 3);
    let s2 = apply_flip(&t, &s, &e).unwrap();
    let naive = certify_linear_morph(&t, &draw(&t, &s, &w3), &draw(&t, &s2, &w3), 0);
    let three = morph_separating_flip(&t, &s, &w3, &e).unwrap();
    let certified = three.iter().enumerate().all(|(k, st)| certify_step(&t, st, k).is_planar());
    let chained = three[0].from == draw(&t, &s, &w3)
        && three[0].to == three[1].from
        && three[1].to == three[2].from
        && three[2].to == draw(&t, &s2, &w3);
    let pass = e.kind == TriangleKind::Separating && !naive.is_planar() && certified && chained;
    Line {
        id: 9,
        name: "separating-triangle necessity",
        pass,
        detail: format!(
            "n = {}, triangle {:?}: single step {:?}, three steps {}",
            t.n(),
            e.triangle,
            naive.verdict,
            if certified && chained { "all Planar" } else { "not certified" }
        ),
        known_failure: false,
    }
}

// ---------------------------------------------------------------------------
// criterion 10

type Q = BigRational;

fn lerp(a: [i64; 3], b: [i64; 3], t: &Q) -> [Q; 2] {
    [0, 1].map(|i| big(a[i]) * (big(1) - t) + big(b[i]) * t)
}

/// Twice the signed area of face `f` at time `t`, computed from positions.
fn area_at(tri: &Triangulation, from: &Drawing, to: &Drawing, f: usize, t: &Q) -> Q {
    let [p, q, r] = tri.faces()[f].map(|v| lerp(from.get(v), to.get(v), t));
    (&r[0] - &p[0]) * (&q[1] - &p[1]) - (&r[1] - &p[1]) * (&q[0] - &p[0])
}

fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let (p, q) = (x.numer(), x.denom());
    let pq = p * q;
    let r = pq.sqrt();
    (&r * &r == pq).then(|| Q::new(r, q.clone()))
}

/// Earliest time in `[0, 1]` at which the area of `f` is zero, solving the
/// quadratic interpolated through `t = 0, 1/2, 1`.
fn independent_root(tri: &Triangulation, from: &Drawing, to: &Drawing, f: usize) -> Option<Q> {
    let half = Q::new(BigInt::from(1), BigInt::from(2));
    let (f0, fh, f1) = (area_at(tri, from, to, f, &Q::zero()), area_at(tri, from, to, f, &half), area_at(tri, from, to, f, &big(1)));
    let a = &f0 * big(2) - &fh * big(4) + &f1 * big(2);
    let b = &f1 - &f0 - &a;
    let c = f0;
    let mut roots = Vec::new();
    if a.is_zero() {
        if !b.is_zero() {
            roots.push(-&c / &b);
        }
    } else {
        let s = rational_sqrt(&(&b * &b - &a * &c * big(4)))?;
        roots.push((-&b - &s) / (&a * big(2)));
        roots.push((-&b + &s) / (&a * big(2)));
    }
    roots.into_iter().filter(|r| !r.is_negative() && *r <= big(1)).min()
}

fn drawing_with(total: i64, pts: &[[i64; 2]]) -> Drawing {
    Drawing::new(total, pts.iter().map(|p| [p[0], p[1], total - p[0] - p[1]]).collect())
}

/// Hand-built collapsing steps.
fn collapse_cases() -> Vec<(Triangulation, Drawing, Drawing)> {
    let mut cases = Vec::new();
    // K4 with the centre pushed out through each side and corner region
    let w = 30;
    let corners = [[w, 0], [0, w], [0, 0]];
    for target in
        [[-10, 10], [10, -20], [40, 20], [25, -5], [-5, -5], [50, 50], [-30, 45], [15, -1], [-1, 15], [20, 20], [70, -10], [-2, -60]]
    {
        let from = drawing_with(w, &[corners[0], corners[1], corners[2], [10, 10]]);
        let to = drawing_with(w, &[corners[0], corners[1], corners[2], target]);
        cases.push((k4(), from, to));
    }
    // point reflection through the centre: every face vanishes at t = 1/2
    for t in [k4(), octahedron(), stacked_octahedron()] {
        let s = schnyder_morph::compute_wood(&t);
        let from = draw(&t, &s, &WeightDistribution::uniform(&t, 3));
        let m = from.total();
        let pts: Vec<[i64; 2]> = from.coords().iter().map(|c| [m - c[0], m - c[1]]).collect();
        cases.push((t, from.clone(), drawing_with(m, &pts)));
    }
    // two interior vertices of the octahedron moving at once
    let t = octahedron();
    let s = schnyder_morph::compute_wood(&t);
    let from = draw(&t, &s, &WeightDistribution::uniform(&t, 3));
    let mut rng = rng_from_seed(0x1010);
    let mut quadratic = 0;
    while quadratic < 10 {
        let mut pts: Vec<[i64; 2]> = from.coords().iter().map(|c| [c[0], c[1]]).collect();
        for v in [3, 4] {
            pts[v] = [rng.random_range(-9..=18), rng.random_range(-9..=18)];
        }
        let to = drawing_with(from.total(), &pts);
        let cert = certify_linear_morph(&t, &from, &to, 0);
        if let Verdict::CollapsedFace { face, exact_root: true, .. } = cert.verdict {
            if cert.per_face[face].0 != 0 {
                quadratic += 1;
                cases.push((t.clone(), from.clone(), to));
            }
        }
    }
    cases
}

fn collapse_line() -> Line {
    let cases = collapse_cases();
    let mut fail = None;
    let mut quadratic = 0;
    for (k, (t, from, to)) in cases.iter().enumerate() {
        let cert = certify_linear_morph(t, from, to, k);
        let Verdict::CollapsedFace { face, t_star, exact_root } = cert.verdict else {
            fail.get_or_insert(format!("case {k}: reported Planar"));
            continue;
        };
        let t_star = Q::new(BigInt::from(*t_star.numer()), BigInt::from(*t_star.denom()));
        let expected = independent_root(t, from, to, face);
        if !exact_root || expected.as_ref() != Some(&t_star) {
            fail.get_or_insert(format!("case {k}: t* = {t_star}, independent root {expected:?}"));
            continue;
        }
        if !area_at(t, from, to, face, &t_star).is_zero() {
            fail.get_or_insert(format!("case {k}: face {face} has non-zero area at t* = {t_star}"));
        }
        // positive before the collapse
        for j in 0..10 {
            let tj = &t_star * Q::new(BigInt::from(j), BigInt::from(10));
            if !area_at(t, from, to, face, &tj).is_positive() {
                fail.get_or_insert(format!("case {k}: face {face} collapses before t* = {t_star}"));
            }
        }
        if cert.per_face[face].0 != 0 {
            quadratic += 1;
        }
    }
    Line {
        id: 10,
        name: "negative-control soundness",
        pass: fail.is_none() && cases.len() >= 20,
        detail: fail.unwrap_or(format!("{} collapsing steps ({quadratic} quadratic), every t* equals the independent root", cases.len())),
        known_failure: false,
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut lines = corpus_lines();
    lines.push(confluence_line());
    lines.push(recognition_line());
    lines.push(separating_line());
    lines.push(collapse_line());
    lines.sort_by_key(|l| l.id);

    let mut unexpected = false;
    for l in &lines {
        let verdict = if l.pass { "PASS" } else { "FAIL" };
        let note = if !l.pass && l.known_failure { " [known deviation]" } else { "" };
        println!("criterion {:>2}  {:<32} {verdict}{note}  {}", l.id, l.name, l.detail);
        unexpected |= !l.pass && !l.known_failure;
    }
    println!("acceptance: {}/{} criteria pass, {:.1?}", lines.iter().filter(|l| l.pass).count(), lines.len(), start.elapsed());
    if unexpected {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
