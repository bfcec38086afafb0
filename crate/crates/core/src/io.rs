//! File formats for plans and frames, and SVG rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::drawing::Drawing;
use crate::morph::{render_frames, Frame, MorphPlan, MorphStep, StepLabel};
use crate::triangulation::{Triangulation, VertexId};
use crate::verify::{certify_step, CollapseCertificate};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepFile {
    pub label: StepLabel,
    pub from: Drawing,
    pub to: Drawing,
    pub certified: bool,
}

/// Plan JSON: `{"W", "scale", "triangulation", "steps"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanFile {
    #[serde(rename = "W")]
    pub total: i64,
    pub scale: [i64; 2],
    pub triangulation: Triangulation,
    pub steps: Vec<StepFile>,
}

impl From<&MorphPlan> for PlanFile {
    fn from(plan: &MorphPlan) -> Self {
        PlanFile {
            total: plan.total(),
            scale: plan.scale,
            triangulation: plan.triangulation.clone(),
            steps: plan
                .steps
                .iter()
                .zip(&plan.certificates)
                .map(|(s, c)| StepFile { label: s.label.clone(), from: s.from.clone(), to: s.to.clone(), certified: c.is_planar() })
                .collect(),
        }
    }
}

impl PlanFile {
    pub fn morph_steps(&self) -> Vec<MorphStep> {
        self.steps.iter().map(|s| MorphStep { label: s.label.clone(), from: s.from.clone(), to: s.to.clone() }).collect()
    }

    /// Fresh certificates for every step, ignoring the stored flags.
    pub fn certify(&self) -> Vec<CollapseCertificate> {
        self.morph_steps().iter().enumerate().map(|(i, s)| certify_step(&self.triangulation, s, i)).collect()
    }

    /// Consecutive steps share their endpoint drawing.
    pub fn is_continuous(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].to == w[1].from)
    }
}

fn ratio_str(r: &Ratio<i64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_ratio(s: &str) -> Result<Ratio<i64>, String> {
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: i64 = p.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    let q: i64 = q.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    if q == 0 {
        return Err(format!("{s:?}: zero denominator"));
    }
    Ok(Ratio::new(p, q))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct FrameRecord {
    step: usize,
    t: String,
    coords: BTreeMap<String, [String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    highlight: Option<[VertexId; 3]>,
}

/// Frames JSON: `{"W", "frames": [{"step", "t", "coords", "highlight"}]}`
/// with every rational written as `"p/q"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FramesRaw", into = "FramesRaw")]
pub struct FramesFile {
    pub total: i64,
    pub frames: Vec<Frame>,
}

#[derive(Serialize, Deserialize)]
struct FramesRaw {
    #[serde(rename = "W")]
    total: i64,
    frames: Vec<FrameRecord>,
}

impl From<FramesFile> for FramesRaw {
    fn from(f: FramesFile) -> Self {
        FramesRaw {
            total: f.total,
            frames: f
                .frames
                .iter()
                .map(|fr| FrameRecord {
                    step: fr.step,
                    t: ratio_str(&fr.t),
                    coords: fr.coords.iter().enumerate().map(|(v, c)| (v.to_string(), c.each_ref().map(ratio_str))).collect(),
                    highlight: fr.highlight,
                })
                .collect(),
        }
    }
}

impl TryFrom<FramesRaw> for FramesFile {
    type Error = String;

    fn try_from(raw: FramesRaw) -> Result<Self, String> {
        let mut frames = Vec::with_capacity(raw.frames.len());
        for r in raw.frames {
            let mut coords = vec![None; r.coords.len()];
            for (k, c) in &r.coords {
                let v: usize = k.parse().map_err(|e| format!("vertex {k:?}: {e}"))?;
                let slot = coords.get_mut(v).ok_or(format!("vertex {v} out of range"))?;
                *slot = Some([parse_ratio(&c[0])?, parse_ratio(&c[1])?, parse_ratio(&c[2])?]);
            }
            frames.push(Frame {
                step: r.step,
                t: parse_ratio(&r.t)?,
                coords: coords.into_iter().collect::<Option<_>>().ok_or("missing vertex")?,
                highlight: r.highlight,
            });
        }
        Ok(FramesFile { total: raw.total, frames })
    }
}

impl FramesFile {
    pub fn new(plan: &MorphPlan, samples: usize) -> Self {
        FramesFile { total: plan.total(), frames: render_frames(plan, samples) }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SvgOptions {
    /// Overlay each vertex's piecewise linear trajectory.
    pub trajectories: Option<Vec<Vec<[Ratio<i64>; 2]>>>,
}

/// A coordinate as an exact integer when it is one, else to 6 decimals.
fn num(r: &Ratio<i64>) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{:.6}", *r.numer() as f64 / *r.denom() as f64)
    }
}

/// One SVG image of a drawing with rational barycentric coordinates, placed at
/// `(v1, v2)` in the square `[0, W]^2`.
pub fn render_svg(
    t: &Triangulation,
    total: i64,
    coords: &[[Ratio<i64>; 3]],
    highlight: Option<[VertexId; 3]>,
    options: &SvgOptions,
) -> String {
    let pt = |v: VertexId| format!("{},{}", num(&coords[v][0]), num(&coords[v][1]));
    let stroke = total as f64 / 400.0;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {total} {total}" width="600" height="600">"#);
    let _ = writeln!(s, r#"<g fill="none" stroke="black" stroke-width="{stroke:.6}" stroke-linejoin="round">"#);
    let ext = t.exterior();
    let _ = writeln!(s, r#"<polygon class="exterior" points="{} {} {}"/>"#, pt(ext[0]), pt(ext[1]), pt(ext[2]));
    for f in t.faces() {
        let _ = writeln!(s, r#"<polygon points="{} {} {}"/>"#, pt(f[0]), pt(f[1]), pt(f[2]));
    }
    let _ = writeln!(s, "</g>");
    if let Some([x, y, z]) = highlight {
        let _ = writeln!(
            s,
            r#"<polygon class="flipped" points="{} {} {}" fill="orange" fill-opacity="0.5" stroke="none"/>"#,
            pt(x),
            pt(y),
            pt(z)
        );
    }
    if let Some(paths) = &options.trajectories {
        let _ = writeln!(s, r#"<g fill="none" stroke="steelblue" stroke-width="{stroke:.6}">"#);
        for p in paths {
            let pts: Vec<String> = p.iter().map(|q| format!("{},{}", num(&q[0]), num(&q[1]))).collect();
            let _ = writeln!(s, r#"<polyline points="{}"/>"#, pts.join(" "));
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, r#"<g fill="black">"#);
    for c in coords {
        let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="{:.6}"/>"#, num(&c[0]), num(&c[1]), 2.5 * stroke);
    }
    let _ = writeln!(s, "</g>\n</svg>");
    s
}

pub fn drawing_svg(t: &Triangulation, d: &Drawing) -> String {
    let coords: Vec<_> = d.coords().iter().map(|c| c.map(Ratio::from)).collect();
    render_svg(t, d.total(), &coords, None, &SvgOptions::default())
}

/// Vertex positions at every step boundary: `steps + 1` points per vertex.
pub fn trajectories(plan: &MorphPlan) -> Vec<Vec<[Ratio<i64>; 2]>> {
    let drawings: Vec<&Drawing> = plan.drawings().collect();
    (0..plan.triangulation.n())
        .map(|v| {
            drawings
                .iter()
                .map(|d| {
                    let c = d.get(v);
                    [Ratio::from(c[0]), Ratio::from(c[1])]
                })
                .collect()
        })
        .collect()
}

/// One SVG per frame of [`render_frames`].
pub fn plan_svgs(plan: &MorphPlan, samples: usize, with_trajectories: bool) -> Vec<String> {
    let options = SvgOptions { trajectories: with_trajectories.then(|| trajectories(plan)) };
    render_frames(plan, samples).iter().map(|f| render_svg(&plan.triangulation, plan.total(), &f.coords, f.highlight, &options)).collect()
}
