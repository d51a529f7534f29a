//! `hyproj`: verification suites and projection sweeps in the ball model.
//!
//! Exit codes: 0 success, 1 property failure, 2 usage error, 3 numerical
//! error. Thread count comes from `RAYON_NUM_THREADS`; output bytes do not
//! depend on it.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hyproj_core::ball::PsiConvention;
use hyproj_core::error::Error;
use hyproj_core::experiments::besfed::{run_besfed, BesfedConfig};
use hyproj_core::experiments::interior::{run_interior, InteriorConfig};
use hyproj_core::experiments::marstrand::{run_marstrand, MarstrandConfig};
use hyproj_core::experiments::verify::{run_verify, VerifyConfig};
use hyproj_core::experiments::write_csv;
use hyproj_core::fractals::{Ifs, IfsSpec, PointCloud};
use hyproj_core::render::{render_svg, RenderOptions};

#[derive(Parser)]
#[command(name = "hyproj", version, about = "Geodesic projections in the ball model: verification and fractal sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every invariant suite and report residuals.
    Verify(VerifyArgs),
    /// Dimension-preservation sweep over random planes.
    Marstrand(MarstrandArgs),
    /// Covering-measure decay of the four-corner set vs a segment control.
    Besfed(BesfedArgs),
    /// Interior-occupancy sweep over random planes.
    Interior(InteriorArgs),
    /// Render a planar cloud and its projection as SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Run at 10% of the full sample sizes.
    #[arg(long)]
    quick: bool,
    /// Use the swapped conversion profile; the collinearity suite must fail.
    #[arg(long = "use-printed-psi")]
    use_printed_psi: bool,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Write the report as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct MarstrandArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Path to an IFS JSON file, or a builtin: `cantor_dust(n,lambda)` /
    /// `four_corner(lambda)`.
    #[arg(long = "ifs-spec")]
    ifs_spec: String,
    #[arg(long)]
    depth: u32,
    #[arg(long = "num-planes")]
    num_planes: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Scales: comma-separated values or `B^-a..-b` (e.g. `2^-2..-7`).
    #[arg(long = "delta-list", default_value = "2^-2..-7")]
    delta_list: String,
    #[arg(long = "embed-radius", default_value_t = 0.5)]
    embed_radius: f64,
    /// Usable-scale filter: smallest admissible count.
    #[arg(long = "min-count", default_value_t = 8)]
    min_count: usize,
    /// Usable-scale filter: largest admissible count as a fraction of points.
    #[arg(long = "max-fraction", default_value_t = 0.2)]
    max_fraction: f64,
    /// Average counts over 4 shifted grids (deterministic; reduces anchoring bias).
    #[arg(long = "offset-average")]
    offset_average: bool,
    #[arg(long)]
    out: PathBuf,
    /// Write the summary as JSON here (in addition to stdout).
    #[arg(long = "summary-json")]
    summary_json: Option<PathBuf>,
}

#[derive(Args)]
struct BesfedArgs {
    /// Deepest generation (3..=8); the sweep measures k = 3..=generations.
    #[arg(long, default_value_t = 7)]
    generations: u32,
    #[arg(long = "num-planes", default_value_t = 40)]
    num_planes: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Corner-map contraction ratio.
    #[arg(long, default_value_t = 0.25)]
    lambda: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "summary-json")]
    summary_json: Option<PathBuf>,
}

#[derive(Args)]
struct InteriorArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long = "ifs-spec")]
    ifs_spec: String,
    #[arg(long)]
    depth: u32,
    #[arg(long = "num-planes")]
    num_planes: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Occupancy scales, same syntax as marstrand's delta-list.
    #[arg(long = "delta-list", default_value = "2^-3..-5")]
    delta_list: String,
    #[arg(long = "window-fraction", default_value_t = 0.5)]
    window_fraction: f64,
    #[arg(long = "embed-radius", default_value_t = 0.5)]
    embed_radius: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "summary-json")]
    summary_json: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// Cloud CSV (one point per row) with 2 columns, inside the unit disk.
    /// Alternative: generate the cloud with --ifs-spec and --depth.
    #[arg(long, conflicts_with = "ifs_spec")]
    input: Option<PathBuf>,
    /// Planar IFS to generate and embed instead of reading a CSV.
    #[arg(long = "ifs-spec", requires = "depth")]
    ifs_spec: Option<String>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long = "embed-radius", default_value_t = 0.5)]
    embed_radius: f64,
    #[arg(long)]
    svg: PathBuf,
    /// Direction of the projection line, degrees.
    #[arg(long = "angle-deg", default_value_t = 30.0)]
    angle_deg: f64,
    #[arg(long, default_value_t = 640)]
    size: u32,
    /// How many sample points get a drawn connecting geodesic.
    #[arg(long, default_value_t = 12)]
    geodesics: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Verify(args) => {
            let cfg = VerifyConfig {
                seed: args.seed,
                quick: args.quick,
                psi: if args.use_printed_psi {
                    PsiConvention::Printed
                } else {
                    PsiConvention::ChordModel
                },
            };
            let report = run_verify(&cfg);
            print!("{}", report.render_text());
            if let Some(path) = args.json {
                std::fs::write(&path, serde_json::to_string_pretty(&report).expect("report serializes"))?;
            }
            Ok(if report.all_passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Marstrand(args) => {
            let ifs = load_ifs(&args.ifs_spec)?;
            let mut cfg = MarstrandConfig::new(args.n, args.m, ifs, args.depth, args.num_planes, args.seed);
            cfg.deltas = parse_delta_list(&args.delta_list)?;
            cfg.embed_radius = args.embed_radius;
            cfg.min_count = args.min_count;
            cfg.max_fraction = args.max_fraction;
            cfg.offset_average = args.offset_average;
            let out = run_marstrand(&cfg)?;
            write_csv_file(&args.out, args.m, &out.rows)?;
            print!("{}", out.summary.render_text());
            if let Some(path) = args.summary_json {
                std::fs::write(&path, serde_json::to_string_pretty(&out.summary).expect("summary serializes"))?;
            }
            println!("rows written to {}", args.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Besfed(args) => {
            let mut cfg = BesfedConfig::new(args.generations, args.num_planes, args.seed);
            cfg.lambda = args.lambda;
            let out = run_besfed(&cfg)?;
            write_csv_file(&args.out, 1, &out.rows)?;
            print!("{}", out.summary.render_text());
            if let Some(path) = args.summary_json {
                std::fs::write(&path, serde_json::to_string_pretty(&out.summary).expect("summary serializes"))?;
            }
            println!("rows written to {}", args.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Interior(args) => {
            let ifs = load_ifs(&args.ifs_spec)?;
            let mut cfg = InteriorConfig::new(args.n, args.m, ifs, args.depth, args.num_planes, args.seed);
            cfg.deltas = parse_delta_list(&args.delta_list)?;
            cfg.window_fraction = args.window_fraction;
            cfg.embed_radius = args.embed_radius;
            let out = run_interior(&cfg)?;
            if let Some(w) = &out.summary.hypothesis_warning {
                eprintln!("warning: {w}");
            }
            write_csv_file(&args.out, args.m, &out.rows)?;
            print!("{}", out.summary.render_text());
            if let Some(path) = args.summary_json {
                std::fs::write(&path, serde_json::to_string_pretty(&out.summary).expect("summary serializes"))?;
            }
            println!("rows written to {}", args.out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Render(args) => {
            let cloud = match (&args.input, &args.ifs_spec) {
                (Some(path), None) => PointCloud::<f64>::read_csv_path(path)?,
                (None, Some(spec)) => {
                    let ifs = load_ifs(spec)?;
                    let depth = args.depth.expect("clap enforces --depth with --ifs-spec");
                    hyproj_core::fractals::embed_in_ball(
                        &hyproj_core::fractals::generate_depth(&ifs, depth)?,
                        args.embed_radius,
                    )?
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "render needs exactly one of --input or --ifs-spec/--depth".into(),
                    ))
                }
            };
            let opts = RenderOptions {
                angle_deg: args.angle_deg,
                size: args.size,
                geodesic_count: args.geodesics,
            };
            let svg = render_svg(&cloud, &opts)?;
            std::fs::write(&args.svg, svg)?;
            println!("svg written to {}", args.svg.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn write_csv_file(path: &Path, m: usize, rows: &[hyproj_core::experiments::ExperimentRow]) -> Result<(), Error> {
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), m, rows)
}

/// Accepts a path to an IFS JSON file or a builtin constructor:
/// `cantor_dust(n,lambda)` or `four_corner(lambda)`.
fn load_ifs(spec: &str) -> Result<Ifs<f64>, Error> {
    let trimmed = spec.trim();
    if let Some(body) = strip_call(trimmed, "cantor_dust") {
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(Error::InvalidArgument("cantor_dust takes (n, lambda)".into()));
        }
        let n: usize = parts[0]
            .parse()
            .map_err(|e| Error::Parse(format!("cantor_dust n: {e}")))?;
        let lambda: f64 = parts[1]
            .parse()
            .map_err(|e| Error::Parse(format!("cantor_dust lambda: {e}")))?;
        return Ifs::cantor_dust(n, lambda);
    }
    if let Some(body) = strip_call(trimmed, "four_corner") {
        let lambda: f64 = body
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("four_corner lambda: {e}")))?;
        return Ifs::four_corner(lambda);
    }
    let text = std::fs::read_to_string(trimmed).map_err(|e| {
        Error::InvalidArgument(format!(
            "ifs-spec `{trimmed}` is neither a readable file nor a builtin: {e}"
        ))
    })?;
    IfsSpec::from_json(&text)?.to_ifs()
}

fn strip_call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.trim().strip_prefix('(')?.strip_suffix(')')
}

/// `0.25,0.125` or `B^-a..-b` (inclusive, descending powers of base B).
fn parse_delta_list(s: &str) -> Result<Vec<f64>, Error> {
    let s = s.trim();
    if let Some((base, range)) = s.split_once('^') {
        let base: f64 = base
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("delta-list base: {e}")))?;
        let (a, b) = range
            .split_once("..")
            .ok_or_else(|| Error::Parse("delta-list range needs `a..b`".into()))?;
        let a: i32 = a.trim().parse().map_err(|e| Error::Parse(format!("delta-list: {e}")))?;
        let b: i32 = b.trim().parse().map_err(|e| Error::Parse(format!("delta-list: {e}")))?;
        let (lo, hi) = (a.min(b), a.max(b));
        let mut out: Vec<f64> = (lo..=hi).map(|j| base.powi(j)).collect();
        out.sort_by(|x, y| y.partial_cmp(x).unwrap());
        if out.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(Error::Parse("delta-list produced non-positive scales".into()));
        }
        return Ok(out);
    }
    let vals: Result<Vec<f64>, _> = s.split(',').map(|tok| tok.trim().parse::<f64>()).collect();
    let vals = vals.map_err(|e| Error::Parse(format!("delta-list: {e}")))?;
    if vals.is_empty() || vals.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::Parse("delta-list needs positive scales".into()));
    }
    Ok(vals)
}
