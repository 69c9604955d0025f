//! `treegraded`: JSON front end for the universal tree-graded space and the
//! finite-graph verifier.
//!
//! Points and classes are given either by name (looked up in `--scene`) or
//! inline as JSON. Results go to stdout as JSON; errors go to stderr with
//! exit code 2.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use treegraded::checks::{run_suite, Suite};
use treegraded::scene::Scene;
use treegraded::stretch::StretchSpec;
use treegraded::structure::PieceRef;
use treegraded::verifier::{verify, GraphSpec, DEFAULT_CAP};
use treegraded::{
    dist, realize_class, to_canonical_json, ExplicitGeodesic, Label, PGeodesic, Scalar, UPoint,
};

#[derive(Parser)]
#[command(
    name = "treegraded",
    version,
    about = "Exact computations in a universal tree-graded space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two points.
    Dist {
        #[arg(long)]
        scene: PathBuf,
        f: String,
        g: String,
    },
    /// Point at arc length `t` on the explicit geodesic from `f` to `g`.
    Geodesic {
        #[arg(long)]
        scene: PathBuf,
        f: String,
        g: String,
        t: Scalar,
    },
    /// Projection of `r` onto the piece of type `piece` and label `label` hung at `base`.
    Project {
        #[arg(long)]
        scene: PathBuf,
        r: String,
        #[arg(long)]
        base: String,
        #[arg(long)]
        piece: u32,
        #[arg(long, default_value_t = 0)]
        label: Label,
    },
    /// Concatenation `f * g`.
    Concat {
        #[arg(long)]
        scene: PathBuf,
        f: String,
        g: String,
    },
    /// Restriction of `f` to `[0, x]`.
    Restrict {
        #[arg(long)]
        scene: PathBuf,
        f: String,
        x: Scalar,
    },
    /// Image of `f` under the segmentwise stretch map.
    Stretch {
        #[arg(long)]
        scene: PathBuf,
        /// Stretch context file; defaults to the scene's own context.
        #[arg(long)]
        context: Option<PathBuf>,
        f: String,
    },
    /// Runs a seeded invariant suite; exits 0 iff no violations.
    Check {
        suite: Suite,
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Decides whether a weighted graph with a piece cover is tree-graded; exits 0 iff accepted.
    VerifyGraph {
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        file: PathBuf,
    },
    /// One copy of the class `w` per label.
    Realize {
        #[arg(long)]
        scene: PathBuf,
        w: String,
        #[arg(long, value_delimiter = ',', required = true)]
        labels: Vec<Label>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_scene(path: &Path) -> Result<Scene> {
    Scene::from_json(&read(path)?).with_context(|| format!("loading scene {}", path.display()))
}

fn point(scene: &Scene, arg: &str) -> Result<UPoint> {
    let p = if arg.trim_start().starts_with('{') {
        serde_json::from_str(arg).with_context(|| format!("parsing point {arg}"))?
    } else {
        scene.point(arg)?.clone()
    };
    p.validate(&scene.family, scene.capacity)
        .with_context(|| format!("point {arg} does not fit the scene"))?;
    Ok(p)
}

fn class(scene: &Scene, arg: &str) -> Result<PGeodesic> {
    let w: PGeodesic = if arg.trim_start().starts_with('{') {
        serde_json::from_str(arg).with_context(|| format!("parsing class {arg}"))?
    } else {
        scene.class(arg)?.clone()
    };
    w.validate(&scene.family)
        .with_context(|| format!("class {arg} does not fit the scene"))?;
    Ok(w)
}

fn run(cli: Cli) -> Result<(String, bool)> {
    let out = match cli.command {
        Command::Dist { scene, f, g } => {
            let s = load_scene(&scene)?;
            to_canonical_json(&dist(&s.family, &point(&s, &f)?, &point(&s, &g)?)?)
        }
        Command::Geodesic { scene, f, g, t } => {
            let s = load_scene(&scene)?;
            let (f, g) = (point(&s, &f)?, point(&s, &g)?);
            to_canonical_json(&ExplicitGeodesic::new(&s.family, &f, &g)?.eval(&t)?)
        }
        Command::Project {
            scene,
            r,
            base,
            piece,
            label,
        } => {
            let s = load_scene(&scene)?;
            s.family.piece(piece)?;
            let p = PieceRef::new(point(&s, &base)?, piece, label);
            to_canonical_json(&p.project(&s.family, &point(&s, &r)?)?)
        }
        Command::Concat { scene, f, g } => {
            let s = load_scene(&scene)?;
            let h = point(&s, &f)?.concat(&point(&s, &g)?);
            h.validate(&s.family, s.capacity)?;
            to_canonical_json(&h)
        }
        Command::Restrict { scene, f, x } => {
            let s = load_scene(&scene)?;
            to_canonical_json(&point(&s, &f)?.restrict(&s.family, &x)?)
        }
        Command::Stretch { scene, context, f } => {
            let s = load_scene(&scene)?;
            let ctx = match context {
                Some(path) => {
                    let spec: StretchSpec = serde_json::from_str(&read(&path)?)
                        .with_context(|| format!("parsing stretch context {}", path.display()))?;
                    spec.build(&s.family)?
                }
                None => s
                    .stretch_context()?
                    .ok_or_else(|| anyhow!("no --context given and the scene has no stretch"))?,
            };
            to_canonical_json(&ctx.psi_point(&point(&s, &f)?)?)
        }
        Command::Check {
            suite,
            scene,
            seed,
            samples,
        } => {
            let s = load_scene(&scene)?;
            let ctx = s.stretch_context()?;
            let report = run_suite(suite, &s.family, s.capacity, ctx.as_ref(), samples, seed)?;
            return Ok((to_canonical_json(&report), report.is_clean()));
        }
        Command::VerifyGraph { cap, file } => {
            if cap == 0 {
                bail!("--cap must be positive");
            }
            let spec: GraphSpec = serde_json::from_str(&read(&file)?)
                .with_context(|| format!("parsing graph {}", file.display()))?;
            let (graph, cover) = spec.build()?;
            let verdict = verify(&graph, &cover, cap)?;
            return Ok((to_canonical_json(&verdict), verdict.accepted));
        }
        Command::Realize { scene, w, labels } => {
            let s = load_scene(&scene)?;
            to_canonical_json(&realize_class(
                &s.family,
                s.capacity,
                &class(&s, &w)?,
                &labels,
            )?)
        }
    };
    Ok((out, true))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((out, ok)) => {
            println!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
