//! Command-line front end: `run`, `montecarlo` and `boundary`.

mod config;
mod output;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{BoxChoice, RunConfig};
pub use output::{boundary_svg, cells_svg, read_samples, write_boundary, write_history, write_images, write_samples};

use crate::cvt::SampleSet;
use crate::geom2d::{BoundingBox, Point};
use crate::maps::{monte_carlo, DiagramMap};
use crate::pipeline::{extract_boundary, multigrid};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "BSCVT_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Share of the image extent added on every side of an automatic box.
const AUTO_MARGIN: f64 = 0.25;
/// Monte Carlo draws used to size an automatic box.
const PILOT_SAMPLES: usize = 4000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "bscvt", version, about = "Centroidal Voronoi sampling of the image of a map into the plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimise a sample set and write samples, images, cells and history.
    Run(RunArgs),
    /// Write the images of uniform random samples.
    Montecarlo(MonteCarloArgs),
    /// Extract the region outline from a samples file.
    Boundary(BoundaryArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Map name, `tracedet:<d>` or `apw:<q>`.
    #[arg(long)]
    map: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// `xmin,xmax,ymin,ymax` or `auto`.
    #[arg(long = "box", allow_hyphen_values = true)]
    bbox: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Initial sample count.
    #[arg(long)]
    samples: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    /// Lloyd iterations per round.
    #[arg(long)]
    q1: Option<String>,
    /// Quasi-Newton iterations per round.
    #[arg(long)]
    q2: Option<String>,
    /// Refinement rounds.
    #[arg(long)]
    nref: Option<String>,
    /// `spheres` or `delaunay`.
    #[arg(long)]
    refine: Option<String>,
    /// Disk `cx,cy,r` to confine the images to.
    #[arg(long, allow_hyphen_values = true)]
    restrict: Option<String>,
}

#[derive(Debug, Args)]
struct MonteCarloArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of samples.
    #[arg(long)]
    n: Option<String>,
}

#[derive(Debug, Args)]
struct BoundaryArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// A `samples.csv` written by `run`.
    #[arg(long)]
    input: PathBuf,
    /// Smallest triangle angle kept, in degrees.
    #[arg(long, allow_hyphen_values = true)]
    min_angle: Option<String>,
    /// Largest triangle angle kept, in degrees.
    #[arg(long, allow_hyphen_values = true)]
    max_angle: Option<String>,
}

fn build_config(common: &CommonArgs, extra: &[(&str, &Option<String>)]) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        cfg.load_file(path)?;
    }
    let flags = [("map", &common.map), ("seed", &common.seed), ("box", &common.bbox), ("out", &common.out)];
    for (key, value) in flags.iter().chain(extra) {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Caps the global worker pool from `BSCVT_THREADS`, if set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Box around `images` (and the map's known bounds) with the automatic
/// margin.
pub fn auto_box(map: &dyn DiagramMap, images: &[Point]) -> Option<BoundingBox> {
    let observed = BoundingBox::around(images);
    let known = map.image_bounds();
    let b = match (observed, known) {
        (Some(a), Some(b)) => a.union(&b),
        (a, b) => a.or(b)?,
    };
    Some(b.inflated(AUTO_MARGIN))
}

fn resolve_box(map: &dyn DiagramMap, cfg: &RunConfig) -> Result<BoundingBox, CliError> {
    match cfg.bbox {
        BoxChoice::Fixed(b) => Ok(b),
        BoxChoice::Auto => {
            let pilot = monte_carlo(map, PILOT_SAMPLES, cfg.seed).map_err(runtime)?;
            auto_box(map, &pilot.images).ok_or_else(|| CliError::Runtime("cannot size the box".into()))
        }
    }
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::Runtime(format!("{}: {e}", cfg.out.display())))?;
    Ok(cfg.out.clone())
}

fn cmd_run(cfg: &RunConfig) -> Result<(), CliError> {
    let map = cfg.map.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let bbox = resolve_box(&map, cfg)?;
    let run = multigrid(&map, cfg.samples, bbox, &cfg.refine_config(), cfg.seed, cfg.restrict.as_ref()).map_err(runtime)?;
    let tess = run.state.tessellate().map_err(runtime)?;

    let dir = out_dir(cfg)?;
    write_samples(&dir.join("samples.csv"), &run.state.samples)?;
    write_images(&dir.join("images.csv"), &run.state.images)?;
    write_history(&dir.join("history.csv"), &run.history)?;
    output::write_text(&dir.join("cells.svg"), &cells_svg(run.state.bbox, &run.state.images, &tess))?;

    let b = run.state.bbox;
    println!("map {} box [{}, {}] x [{}, {}]", cfg.map, b.xmin, b.xmax, b.ymin, b.ymax);
    for r in &run.history {
        println!("round {} M {} H {:.10}", r.round, r.samples, r.energy);
    }
    Ok(())
}

fn cmd_montecarlo(cfg: &RunConfig) -> Result<(), CliError> {
    let map = cfg.map.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let mc = monte_carlo(&map, cfg.n, cfg.seed).map_err(runtime)?;
    let dir = out_dir(cfg)?;
    write_images(&dir.join("mc_images.csv"), &mc.images)?;
    println!("map {} samples {} skipped {}", cfg.map, mc.images.len(), mc.skipped);
    Ok(())
}

fn cmd_boundary(cfg: &RunConfig, input: &std::path::Path) -> Result<(), CliError> {
    let map = cfg.map.build().map_err(|e| CliError::Usage(e.to_string()))?;
    let samples = read_samples(input)?;
    if samples.len() < 3 {
        return Err(CliError::Usage(format!("{}: need at least 3 samples, got {}", input.display(), samples.len())));
    }
    if let Some(x) = samples.iter().find(|x| x.len() != map.dim()) {
        return Err(CliError::Usage(format!("{} expects {} parameters, the input has {}", cfg.map, map.dim(), x.len())));
    }
    let images: Vec<Point> = samples.iter().map(|x| map.evaluate(x)).collect::<Result<_, _>>().map_err(runtime)?;
    let bbox = match cfg.bbox {
        BoxChoice::Fixed(b) => b,
        BoxChoice::Auto => BoundingBox::around(&images)
            .map(|b| b.inflated(AUTO_MARGIN))
            .ok_or_else(|| CliError::Runtime("cannot size the box".into()))?,
    };
    let state = SampleSet::new(&map, samples, bbox, cfg.seed).map_err(runtime)?;
    let boundary = extract_boundary(&state, cfg.min_angle, cfg.max_angle).map_err(runtime)?;

    let dir = out_dir(cfg)?;
    write_boundary(&dir.join("boundary.csv"), &boundary)?;
    output::write_text(&dir.join("boundary.svg"), &boundary_svg(bbox, &state.images, &boundary))?;
    println!(
        "loops {} holes {} area {:.6} flagged {} triangles kept {} dropped {}",
        boundary.loops.len(),
        boundary.holes.len(),
        boundary.area(),
        boundary.flagged.len(),
        boundary.kept_triangles,
        boundary.dropped_triangles
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Run(a) => {
            let extra = [
                ("samples", &a.samples),
                ("eps", &a.eps),
                ("q1", &a.q1),
                ("q2", &a.q2),
                ("nref", &a.nref),
                ("refine", &a.refine),
                ("restrict", &a.restrict),
            ];
            cmd_run(&build_config(&a.common, &extra)?)
        }
        Command::Montecarlo(a) => cmd_montecarlo(&build_config(&a.common, &[("n", &a.n)])?),
        Command::Boundary(a) => {
            let cfg = build_config(&a.common, &[("min-angle", &a.min_angle), ("max-angle", &a.max_angle)])?;
            cmd_boundary(&cfg, &a.input)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors are reported on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
