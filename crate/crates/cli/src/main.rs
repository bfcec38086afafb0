//! `schnyder-morph`: weighted Schnyder drawings and planar morphs from the
//! command line.
//!
//! Exit codes: 0 success, 1 validation failure, 2 certification failure,
//! 3 I/O or format error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use schnyder_morph::drawing::{draw, is_planar, WeightDistribution, WeightsFile};
use schnyder_morph::flip::{flip_sequence, flippable_triangles, FlipEvent};
use schnyder_morph::generate::{random_triangulation, random_weights, random_wood, rng_from_seed, GENERATOR_VERSION};
use schnyder_morph::io::{drawing_svg, plan_svgs, FramesFile, PlanFile};
use schnyder_morph::morph::plan_morph;
use schnyder_morph::recognize::{normalize_cartesian, parse_rational, recognize, BigRational, Point};
use schnyder_morph::schnyder::{compute_wood, SchnyderWood, WoodFile};
use schnyder_morph::triangulation::{Triangulation, TriangulationFile};
use schnyder_morph::verify::Verdict;

#[derive(Parser)]
#[command(name = "schnyder-morph", version, about = "Weighted Schnyder drawings and planar morphs")]
struct Cli {
    /// Also write a JSON manifest of this run (command, paths, seed, samples).
    #[arg(long, global = true, value_name = "FILE")]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a Schnyder wood, or validate one with --check.
    Wood {
        /// Triangulation JSON.
        #[arg(long)]
        input: PathBuf,
        /// Wood JSON to validate instead of computing one.
        #[arg(long)]
        check: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Draw a triangulation with a wood and face weights.
    Draw {
        #[arg(long)]
        input: PathBuf,
        /// Wood JSON; computed if omitted.
        #[arg(long)]
        wood: Option<PathBuf>,
        /// Weights JSON; uniform weights are used if omitted.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Uniform weight per face when --weights is absent.
        #[arg(long, default_value_t = 1)]
        uniform: i64,
        /// Write an SVG of the drawing.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// List the flippable (counterclockwise) and floppable (clockwise) triangles.
    Flips {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        wood: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// A flip/flop sequence taking wood A to wood B.
    Flipseq {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        wood_a: PathBuf,
        #[arg(long)]
        wood_b: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Plan and certify a planar morph between two weighted Schnyder drawings.
    Morph(MorphArgs),
    /// Re-certify every step of a plan; exit 2 on the first collapse.
    Verify {
        #[arg(long)]
        plan: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Decide whether a drawing is a weighted Schnyder drawing.
    Recognize {
        #[arg(long)]
        input: PathBuf,
        /// Coordinates JSON: {"W": total, "coords": {"v": [v1, v2, v3]}} with
        /// numbers, decimals or "p/q" strings; two values per vertex are read as
        /// Cartesian points.
        #[arg(long)]
        coords: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Generate a seeded random triangulation, and optionally a wood and weights.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Diagonal flip attempts after stacking; defaults to 2n.
        #[arg(long)]
        flips: Option<usize>,
        /// Also write a random wood reached by this many flips and flops.
        #[arg(long, value_name = "FILE")]
        wood_out: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        wood_steps: usize,
        /// Also write random weights with total 6n - 15.
        #[arg(long, value_name = "FILE")]
        weights_out: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct MorphArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    wood_a: PathBuf,
    /// Weights of the source drawing; uniform if omitted.
    #[arg(long)]
    weights_a: Option<PathBuf>,
    #[arg(long)]
    wood_b: PathBuf,
    /// Weights of the target drawing; uniform if omitted.
    #[arg(long)]
    weights_b: Option<PathBuf>,
    /// Directory for one SVG per frame.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Frames per step, counted as intervals: each step yields samples + 1 frames.
    #[arg(long, default_value_t = 1)]
    samples: usize,
    /// Overlay vertex trajectories on the SVG frames.
    #[arg(long)]
    trajectories: bool,
    /// Write sampled frames with exact "p/q" coordinates.
    #[arg(long)]
    frames: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct Output {
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Manifest {
    command: String,
    inputs: BTreeMap<String, PathBuf>,
    outputs: BTreeMap<String, PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generator_version: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
}

impl Manifest {
    fn new(command: &str) -> Self {
        Manifest {
            command: command.into(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            seed: None,
            generator_version: None,
            samples: None,
        }
    }

    fn input(mut self, key: &str, p: &Path) -> Self {
        self.inputs.insert(key.into(), p.to_path_buf());
        self
    }

    fn maybe_input(self, key: &str, p: &Option<PathBuf>) -> Self {
        match p {
            Some(p) => self.input(key, p),
            None => self,
        }
    }

    fn output(mut self, key: &str, p: &Option<PathBuf>) -> Self {
        if let Some(p) = p {
            self.outputs.insert(key.into(), p.clone());
        }
        self
    }
}

enum Failure {
    Validation(anyhow::Error),
    Certification(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Certification(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Validation(e) | Failure::Certification(e) | Failure::Io(e) => e,
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn io<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Io(e.into())
}

fn invalid<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Validation(e.into())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(io)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(io)
}

fn write_bytes(path: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())).map_err(io),
        None => std::io::stdout().write_all(bytes).context("writing stdout").map_err(io),
    }
}

fn write_json<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(io)?;
    s.push('\n');
    write_bytes(path, s.as_bytes())
}

fn load_triangulation(path: &Path) -> Result<Triangulation> {
    let file: TriangulationFile = read_json(path)?;
    Triangulation::try_from(file).with_context(|| format!("{} is not a valid triangulation", path.display())).map_err(invalid)
}

fn load_wood(t: &Triangulation, path: &Path) -> Result<SchnyderWood> {
    let file: WoodFile = read_json(path)?;
    SchnyderWood::from_labels(t, &file.edges).with_context(|| format!("{} is not a Schnyder wood", path.display())).map_err(invalid)
}

fn load_weights(t: &Triangulation, path: &Option<PathBuf>, uniform: i64) -> Result<WeightDistribution> {
    let w = match path {
        None => {
            if uniform <= 0 {
                return Err(invalid(anyhow!("uniform weight must be positive")));
            }
            WeightDistribution::uniform(t, uniform)
        }
        Some(p) => {
            let file: WeightsFile = read_json(p)?;
            WeightDistribution::try_from(file).with_context(|| format!("{} is not a weight distribution", p.display())).map_err(invalid)?
        }
    };
    w.check_for(t).map_err(invalid)?;
    Ok(w)
}

fn rational(v: &serde_json::Value) -> Result<BigRational> {
    let s = match v {
        serde_json::Value::Number(n) => n.to_string(),
        serde_json::Value::String(s) => s.clone(),
        other => return Err(io(anyhow!("expected a number, found {other}"))),
    };
    parse_rational(&s).map_err(|e| io(anyhow!(e)))
}

/// Coordinates JSON as barycentric points and their total.
fn load_coords(t: &Triangulation, path: &Path) -> Result<(BigRational, Vec<Point>)> {
    let v: serde_json::Value = read_json(path)?;
    let bad = |msg: &str| io(anyhow!("{}: {msg}", path.display()));
    let raw: Vec<(usize, &serde_json::Value)> = match &v["coords"] {
        serde_json::Value::Object(m) => {
            m.iter().map(|(k, x)| k.parse().map(|k| (k, x)).map_err(|_| bad("vertex ids must be integers"))).collect::<Result<_>>()?
        }
        serde_json::Value::Array(a) => a.iter().enumerate().collect(),
        _ => return Err(bad("missing \"coords\"")),
    };
    let mut pts: Vec<Option<Vec<BigRational>>> = vec![None; t.n()];
    for (k, x) in raw {
        let arr = x.as_array().ok_or_else(|| bad("each point must be an array"))?;
        let slot = pts.get_mut(k).ok_or_else(|| bad("vertex id out of range"))?;
        *slot = Some(arr.iter().map(rational).collect::<Result<_>>()?);
    }
    let pts: Vec<Vec<_>> = pts.into_iter().collect::<Option<_>>().ok_or_else(|| bad("missing vertices"))?;
    let total = match v.get("W") {
        Some(w) => Some(rational(w)?),
        None => None,
    };
    if pts.iter().all(|p| p.len() == 3) {
        let total = total.ok_or_else(|| bad("barycentric coordinates need \"W\""))?;
        Ok((total, pts.into_iter().map(|p| [p[0].clone(), p[1].clone(), p[2].clone()]).collect()))
    } else if pts.iter().all(|p| p.len() == 2) {
        let total = total.unwrap_or_else(|| BigRational::from_integer(1.into()));
        let cart: Vec<_> = pts.into_iter().map(|p| [p[0].clone(), p[1].clone()]).collect();
        let bary = normalize_cartesian(t, &cart, &total).map_err(invalid)?;
        Ok((total, bary))
    } else {
        Err(bad("points need two or three coordinates each"))
    }
}

#[derive(Serialize)]
struct FlipLists {
    flips: Vec<FlipEvent>,
    flops: Vec<FlipEvent>,
}

fn run(command: Command) -> Result<Manifest> {
    match command {
        Command::Wood { input, check, out } => {
            let t = load_triangulation(&input)?;
            let m = Manifest::new("wood").input("input", &input).maybe_input("check", &check);
            match check {
                Some(p) => {
                    let s = load_wood(&t, &p)?;
                    write_json(&out.out, &WoodFile::from(s))?;
                }
                None => write_json(&out.out, &compute_wood(&t))?,
            }
            Ok(m.output("out", &out.out))
        }
        Command::Draw { input, wood, weights, uniform, svg, out } => {
            let t = load_triangulation(&input)?;
            let s = match &wood {
                Some(p) => load_wood(&t, p)?,
                None => compute_wood(&t),
            };
            let w = load_weights(&t, &weights, uniform)?;
            let d = draw(&t, &s, &w);
            if !is_planar(&t, &d) {
                return Err(Failure::Certification(anyhow!("drawing is not planar")));
            }
            write_json(&out.out, &d)?;
            if let Some(p) = &svg {
                write_bytes(&Some(p.clone()), drawing_svg(&t, &d).as_bytes())?;
            }
            Ok(Manifest::new("draw")
                .input("input", &input)
                .maybe_input("wood", &wood)
                .maybe_input("weights", &weights)
                .output("out", &out.out)
                .output("svg", &svg))
        }
        Command::Flips { input, wood, out } => {
            let t = load_triangulation(&input)?;
            let s = load_wood(&t, &wood)?;
            let (flips, flops) = flippable_triangles(&t, &s);
            write_json(&out.out, &FlipLists { flips, flops })?;
            Ok(Manifest::new("flips").input("input", &input).input("wood", &wood).output("out", &out.out))
        }
        Command::Flipseq { input, wood_a, wood_b, out } => {
            let t = load_triangulation(&input)?;
            let a = load_wood(&t, &wood_a)?;
            let b = load_wood(&t, &wood_b)?;
            let seq = flip_sequence(&t, &a, &b).map_err(invalid)?;
            write_json(&out.out, &seq)?;
            Ok(Manifest::new("flipseq").input("input", &input).input("wood_a", &wood_a).input("wood_b", &wood_b).output("out", &out.out))
        }
        Command::Morph(args) => morph(args),
        Command::Verify { plan, out } => {
            let file: PlanFile = read_json(&plan)?;
            let certs = file.certify();
            write_json(&out.out, &certs)?;
            if !file.is_continuous() {
                return Err(invalid(anyhow!("consecutive steps do not share endpoints")));
            }
            if let Some(c) = certs.iter().find(|c| !c.is_planar()) {
                let Verdict::CollapsedFace { face, t_star, .. } = &c.verdict else { unreachable!() };
                return Err(Failure::Certification(anyhow!("step {}: face {face} collapses at t = {t_star}", c.step)));
            }
            eprintln!("{} steps certified planar", certs.len());
            Ok(Manifest::new("verify").input("plan", &plan).output("out", &out.out))
        }
        Command::Recognize { input, coords, out } => {
            let t = load_triangulation(&input)?;
            let (total, c) = load_coords(&t, &coords)?;
            let r = recognize(&t, &total, &c).map_err(invalid)?;
            write_json(&out.out, &r)?;
            Ok(Manifest::new("recognize").input("input", &input).input("coords", &coords).output("out", &out.out))
        }
        Command::Gen { n, seed, flips, wood_out, wood_steps, weights_out, out } => {
            if n < 4 {
                return Err(invalid(anyhow!("--n must be at least 4")));
            }
            let mut rng = rng_from_seed(seed);
            let t = random_triangulation(n, flips.unwrap_or(2 * n), &mut rng);
            write_json(&out.out, &t)?;
            if wood_out.is_some() {
                write_json(&wood_out, &random_wood(&t, wood_steps, &mut rng))?;
            }
            if weights_out.is_some() {
                write_json(&weights_out, &random_weights(&t, 3 * t.face_count() as i64, &mut rng))?;
            }
            let mut m = Manifest::new("gen").output("out", &out.out).output("wood", &wood_out).output("weights", &weights_out);
            m.seed = Some(seed);
            m.generator_version = Some(GENERATOR_VERSION);
            Ok(m)
        }
    }
}

fn morph(args: MorphArgs) -> Result<Manifest> {
    let t = load_triangulation(&args.input)?;
    let a = load_wood(&t, &args.wood_a)?;
    let b = load_wood(&t, &args.wood_b)?;
    let wa = load_weights(&t, &args.weights_a, 1)?;
    let wb = load_weights(&t, &args.weights_b, 1)?;
    let plan = plan_morph(&t, &a, &wa, &b, &wb).map_err(invalid)?;
    write_json(&args.out.out, &PlanFile::from(&plan))?;
    if let Some(p) = &args.frames {
        write_json(&Some(p.clone()), &FramesFile::new(&plan, args.samples))?;
    }
    if let Some(dir) = &args.svg {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).map_err(io)?;
        for (i, svg) in plan_svgs(&plan, args.samples, args.trajectories).iter().enumerate() {
            let path = dir.join(format!("frame_{i:05}.svg"));
            write_bytes(&Some(path), svg.as_bytes())?;
        }
    }
    eprintln!("{} steps, {} flips", plan.steps.len(), plan.events.len());
    if !plan.all_certified() {
        return Err(Failure::Certification(anyhow!("plan contains a step that is not planar")));
    }
    let mut m = Manifest::new("morph")
        .input("input", &args.input)
        .input("wood_a", &args.wood_a)
        .maybe_input("weights_a", &args.weights_a)
        .input("wood_b", &args.wood_b)
        .maybe_input("weights_b", &args.weights_b)
        .output("out", &args.out.out)
        .output("frames", &args.frames)
        .output("svg", &args.svg);
    m.samples = Some(args.samples);
    Ok(m)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let manifest_path = cli.manifest;
    match run(cli.command) {
        Ok(m) => {
            if let Some(p) = manifest_path {
                if let Err(f) = write_json(&Some(p), &m) {
                    eprintln!("error: {:#}", f.error());
                    return ExitCode::from(f.code());
                }
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
