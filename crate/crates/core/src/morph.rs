//! Morph plans: sequences of certified linear morphs between weighted
//! Schnyder drawings of two woods.
//!
//! Plans work at total weight `6n - 15`. The source weights are first moved
//! to uniform weight 3, then each flip of the flip sequence becomes one
//! linear morph (facial triangles) or three (separating triangles: rebalance
//! the weights, flip, restore uniform weights), and a last weight change
//! reaches the target weights.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drawing::{draw, Drawing, WeightDistribution, WeightError};
use crate::flip::{apply_flip, ccw_state, delta_regions, flip_sequence, predict_coords, FlipError, FlipEvent};
use crate::schnyder::{validate_wood, SchnyderWood, WoodViolation};
use crate::triangulation::{TriangleKind, Triangulation};
use crate::verify::{certify_linear_morph, CollapseCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphError {
    #[error("weight totals differ: {0} and {1}")]
    WeightSumMismatch(i64, i64),
    #[error("weights must total {low} or {high} for this triangulation, got {total}")]
    UnsupportedTotal { total: i64, low: i64, high: i64 },
    #[error("weights must be uniform 3")]
    NotUniform3,
    #[error("triangle {0:?} is not separating")]
    NotSeparating([usize; 3]),
    #[error(transparent)]
    Flip(#[from] FlipError),
    #[error(transparent)]
    Weights(#[from] WeightError),
    #[error(transparent)]
    Wood(#[from] WoodViolation),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StepLabel {
    WeightChange,
    FacialFlip {
        event: FlipEvent,
    },
    SeparatingFlip {
        event: FlipEvent,
    },
    /// Weight change around a separating flip.
    Rebalance {
        event: FlipEvent,
    },
}

impl StepLabel {
    pub fn event(&self) -> Option<&FlipEvent> {
        match self {
            StepLabel::WeightChange => None,
            StepLabel::FacialFlip { event } | StepLabel::SeparatingFlip { event } | StepLabel::Rebalance { event } => Some(event),
        }
    }
}

/// One linear morph: every vertex moves along a segment at constant speed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphStep {
    pub label: StepLabel,
    pub from: Drawing,
    pub to: Drawing,
}

#[derive(Debug, Clone)]
pub struct MorphPlan {
    pub triangulation: Triangulation,
    /// Factors applied to the source and target weights to reach `6n - 15`.
    pub scale: [i64; 2],
    pub steps: Vec<MorphStep>,
    pub certificates: Vec<CollapseCertificate>,
    /// The flip sequence the plan realizes.
    pub events: Vec<FlipEvent>,
}

impl MorphPlan {
    pub fn total(&self) -> i64 {
        self.steps.first().map_or(0, |s| s.from.total())
    }

    pub fn all_certified(&self) -> bool {
        self.certificates.iter().all(CollapseCertificate::is_planar)
    }

    /// Every drawing in the plan, in order: the first `from` and each `to`.
    pub fn drawings(&self) -> impl Iterator<Item = &Drawing> {
        self.steps.first().map(|s| &s.from).into_iter().chain(self.steps.iter().map(|s| &s.to))
    }
}

/// Linear morph between the drawings of one wood under two weight distributions.
pub fn morph_weights(
    t: &Triangulation,
    s: &SchnyderWood,
    w: &WeightDistribution,
    w2: &WeightDistribution,
) -> Result<MorphStep, MorphError> {
    if w.total() != w2.total() {
        return Err(MorphError::WeightSumMismatch(w.total(), w2.total()));
    }
    w.check_for(t)?;
    w2.check_for(t)?;
    Ok(MorphStep { label: StepLabel::WeightChange, from: draw(t, s, w), to: draw(t, s, w2) })
}

/// Linear morph across one facial flip or flop.
pub fn morph_facial_flip(t: &Triangulation, s: &SchnyderWood, w: &WeightDistribution, e: &FlipEvent) -> Result<MorphStep, MorphError> {
    let from = draw(t, s, w);
    facial_step(t, s, w, e, from)
}

fn facial_step(t: &Triangulation, s: &SchnyderWood, w: &WeightDistribution, e: &FlipEvent, from: Drawing) -> Result<MorphStep, MorphError> {
    if e.kind != TriangleKind::Facial {
        return Err(FlipError::InvalidFlip { triangle: e.triangle, direction: e.direction, reason: "not a facial triangle" }.into());
    }
    let to = predict_coords(t, s, w, e, &from)?;
    Ok(MorphStep { label: StepLabel::FacialFlip { event: *e }, from, to })
}

/// Move weight from uniform 3 so that the three regions next to the
/// separating triangle of `e` carry equal weight.
///
/// Greedy: while some region is above the mean (lowest index first), take one
/// unit from its heaviest face (lowest id on ties) and give it to the
/// lightest face (lowest id) of the lowest-indexed region below the mean.
pub fn rebalance_weights(
    t: &Triangulation,
    s: &SchnyderWood,
    w: &WeightDistribution,
    e: &FlipEvent,
) -> Result<WeightDistribution, MorphError> {
    if e.kind != TriangleKind::Separating || t.find_face(e.triangle[0], e.triangle[1], e.triangle[2]).is_some() {
        return Err(MorphError::NotSeparating(e.triangle));
    }
    if !w.is_uniform(3) || w.len() != t.face_count() {
        return Err(MorphError::NotUniform3);
    }
    let s_ccw = ccw_state(t, s, e)?;
    let regions = delta_regions(t, &s_ccw, e.triangle);
    let mut weights = w.weights().to_vec();
    let mut sums = regions.each_ref().map(|r| r.iter().map(|&f| weights[f]).sum::<i64>());
    let mean = sums.iter().sum::<i64>() / 3;
    while let Some(i) = (0..3).find(|&i| sums[i] > mean) {
        let j = (0..3).find(|&j| sums[j] < mean).expect("total above mean implies a deficit");
        let from = *regions[i].iter().max_by_key(|&&f| (weights[f], std::cmp::Reverse(f))).unwrap();
        let to = *regions[j].iter().min_by_key(|&&f| (weights[f], f)).unwrap();
        weights[from] -= 1;
        weights[to] += 1;
        sums[i] -= 1;
        sums[j] += 1;
    }
    Ok(WeightDistribution::new(weights)?)
}

/// The three linear morphs across a separating flip or flop, starting and
/// ending at uniform weight 3.
pub fn morph_separating_flip(
    t: &Triangulation,
    s: &SchnyderWood,
    w3: &WeightDistribution,
    e: &FlipEvent,
) -> Result<[MorphStep; 3], MorphError> {
    let balanced = rebalance_weights(t, s, w3, e)?;
    let s2 = apply_flip(t, s, e)?;
    let d0 = draw(t, s, w3);
    let d1 = draw(t, s, &balanced);
    let d2 = predict_coords(t, s, &balanced, e, &d1)?;
    let d3 = draw(t, &s2, w3);
    let step = |label, from: &Drawing, to: &Drawing| MorphStep { label, from: from.clone(), to: to.clone() };
    Ok([
        step(StepLabel::Rebalance { event: *e }, &d0, &d1),
        step(StepLabel::SeparatingFlip { event: *e }, &d1, &d2),
        step(StepLabel::Rebalance { event: *e }, &d2, &d3),
    ])
}

/// Bring weights to total `6n - 15`, returning the scaled weights and factor.
pub fn normalize_weights(t: &Triangulation, w: &WeightDistribution) -> Result<(WeightDistribution, i64), MorphError> {
    w.check_for(t)?;
    let low = t.face_count() as i64;
    let high = 3 * low;
    match w.total() {
        x if x == high => Ok((w.clone(), 1)),
        x if x == low => Ok((w.scaled(3), 3)),
        total => Err(MorphError::UnsupportedTotal { total, low, high }),
    }
}

/// Plan and certify a morph from `draw(t, a, wa)` to `draw(t, b, wb)`, both
/// taken at total weight `6n - 15`.
pub fn plan_morph(
    t: &Triangulation,
    a: &SchnyderWood,
    wa: &WeightDistribution,
    b: &SchnyderWood,
    wb: &WeightDistribution,
) -> Result<MorphPlan, MorphError> {
    validate_wood(t, a)?;
    validate_wood(t, b)?;
    let (wa, scale_a) = normalize_weights(t, wa)?;
    let (wb, scale_b) = normalize_weights(t, wb)?;
    let w3 = WeightDistribution::uniform(t, 3);
    let events = flip_sequence(t, a, b)?;

    let mut steps = vec![morph_weights(t, a, &wa, &w3)?];
    let mut s = a.clone();
    let mut current = steps[0].to.clone();
    for e in &events {
        match e.kind {
            TriangleKind::Facial => {
                let step = facial_step(t, &s, &w3, e, current)?;
                current = step.to.clone();
                steps.push(step);
            }
            TriangleKind::Separating => {
                let three = morph_separating_flip(t, &s, &w3, e)?;
                current = three[2].to.clone();
                steps.extend(three);
            }
        }
        s = apply_flip(t, &s, e)?;
    }
    let last = morph_weights(t, b, &w3, &wb)?;
    debug_assert_eq!(last.from, current);
    steps.push(last);

    let certificates = steps.iter().enumerate().map(|(i, st)| certify_linear_morph(t, &st.from, &st.to, i)).collect();
    Ok(MorphPlan { triangulation: t.clone(), scale: [scale_a, scale_b], steps, certificates, events })
}

/// A sampled drawing with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub step: usize,
    pub t: Ratio<i64>,
    pub coords: Vec<[Ratio<i64>; 3]>,
    /// Triangle flipped during the step, if any.
    pub highlight: Option<[usize; 3]>,
}

/// `samples + 1` frames per step at `t = 0, 1/samples, ..., 1`.
pub fn render_frames(plan: &MorphPlan, samples: usize) -> Vec<Frame> {
    let k = samples.max(1) as i64;
    let mut frames = Vec::with_capacity(plan.steps.len() * (k as usize + 1));
    for (i, st) in plan.steps.iter().enumerate() {
        let highlight = st.label.event().map(|e| e.triangle);
        for j in 0..=k {
            let t = Ratio::new(j, k);
            let coords = st
                .from
                .coords()
                .iter()
                .zip(st.to.coords())
                .map(|(a, b)| [0, 1, 2].map(|c| Ratio::from(a[c]) * (Ratio::from(1) - t) + Ratio::from(b[c]) * t))
                .collect();
            frames.push(Frame { step: i, t, coords, highlight });
        }
    }
    frames
}
