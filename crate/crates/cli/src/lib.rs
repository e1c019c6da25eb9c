//! Command-line frontend: argument parsing, the serialized run
//! configuration, and output files.
//!
//! Every run writes `run.json` beside its outputs. `rerun <run.json>` replays
//! it; apart from the `seconds` column of `converge.csv` the outputs are
//! byte-identical.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::{ContextKind, ErrorKind};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cubic_slice::attracting::{radius_attracting_with, zcurve, MainCritical, RadiusOptions, DEFAULT_MAX_ITER};
use cubic_slice::family::CubicSlicePoint;
use cubic_slice::parabolic::{cq_poly, cq_roots, measure_from_roots, DEFAULT_ROOT_SEED};
use cubic_slice::parse::{parse_complex, parse_theta};
use cubic_slice::potential::{convergence_table, GridGeometry, SiegelSlice, TestDictionary};
use cubic_slice::render::{
    encode_png, heightfield, render_slice, support_half_width, vslice, Coordinate, GridSpec, RenderOptions,
    Sidecar, SliceImage, SliceMode,
};
use cubic_slice::series::{linearize, DEFAULT_ORDER_ATTRACTING, DEFAULT_ORDER_NEUTRAL};
use cubic_slice::{Complex64, Error};
use serde::{Deserialize, Serialize};

pub const RUN_FILE: &str = "run.json";
pub const THREADS_ENV: &str = "SLICE_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Help or version text; not a failure.
    Info(String),
    Usage(String),
    Library(Error),
    Io(PathBuf, std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => 0,
            CliError::Usage(_) => 2,
            CliError::Library(e) if e.is_numerical() => 3,
            CliError::Library(Error::InvalidInput(_)) => 2,
            CliError::Library(_) | CliError::Io(..) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Info(m) => write!(f, "{m}"),
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Library(e) => write!(f, "error: {e}"),
            CliError::Io(p, e) => write!(f, "error: {}: {e}", p.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn complex_arg(s: &str) -> std::result::Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "cubic-slice", version, about = "Radii, measures and pictures on slices of the cubic family")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; SLICE_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the jittered root-finder starts.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Supersample rasters 2×2.
    #[arg(long = "ss", global = true)]
    supersample: bool,
    #[arg(long = "max-iter", global = true)]
    max_iter: Option<usize>,
}

#[derive(Debug, Args)]
struct WindowArgs {
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "0")]
    center: Complex64,
    #[arg(long = "half-width")]
    half_width: Option<f64>,
    #[arg(long, default_value_t = 512)]
    res: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Classify,
    Equipotential,
    Both,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Coefficients of the linearizing series as CSV.
    Series {
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        lambda: Complex64,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        c: Complex64,
        #[arg(long, default_value_t = DEFAULT_ORDER_ATTRACTING)]
        order: usize,
    },
    /// Radius of convergence of the linearizing series as JSON.
    Radius {
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, conflicts_with = "theta", required_unless_present = "theta")]
        lambda: Option<Complex64>,
        /// Neutral multiplier e^{2πiθ}: golden, cf:a1,a2,... or a decimal.
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        c: Complex64,
        #[arg(long)]
        order: Option<usize>,
    },
    /// Parameter-plane picture in c: PNG and raw class sidecar.
    Slice {
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        lambda: Complex64,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, value_enum, default_value = "classify")]
        mode: ModeArg,
    },
    /// Parameter-plane picture in the unmarked coordinate v.
    Vslice {
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        lambda: Complex64,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// log r - log|c| over a c-plane window: PNG and sidecar.
    Heightfield {
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        lambda: Complex64,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 1024)]
        order: usize,
    },
    /// Points of the Z-curve, one per ray, as CSV.
    Zcurve {
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
        lambda: Complex64,
        #[arg(long, default_value_t = 256)]
        rays: usize,
    },
    /// The polynomial Č, its roots and the atoms of μ_{p/q} as JSON.
    Parabolic {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
    },
    /// Convergence of μ_{p_n/q_n} towards μ_θ as CSV.
    Converge {
        #[arg(long, default_value = "golden")]
        theta: String,
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// Nodes per side of the potential grid.
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long = "half-width", default_value_t = 3.0)]
        half_width: f64,
        #[arg(long, default_value_t = DEFAULT_ORDER_NEUTRAL)]
        order: usize,
    },
    /// Replays a run.json.
    Rerun { config: PathBuf },
}

/// A square window, `half_width` absent for the command's default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub center: Complex64,
    pub half_width: Option<f64>,
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    Series { lambda: Complex64, c: Complex64, order: usize },
    Radius { lambda: Option<Complex64>, theta: Option<String>, c: Complex64, order: Option<usize> },
    Slice { lambda: Complex64, window: Window, mode: SliceMode },
    Vslice { lambda: Complex64, window: Window },
    Heightfield { lambda: Complex64, window: Window, order: usize },
    Zcurve { lambda: Complex64, rays: usize },
    Parabolic { p: u64, q: u64 },
    Converge { theta: String, depth: usize, grid: usize, half_width: f64, order: usize },
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub seed: u64,
    pub supersample: bool,
    pub max_iter: usize,
}

impl RunConfig {
    /// Pretty-printed JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> CliResult<Self> {
        serde_json::from_str(s).map_err(|e| CliError::Usage(format!("run config: {e}")))
    }
}

fn window(w: &WindowArgs) -> Window {
    Window { center: w.center, half_width: w.half_width, resolution: w.res }
}

/// Parses `argv` (program name first) into a configuration.
pub fn parse_args<I, T>(argv: I) -> CliResult<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
        ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            CliError::Usage("a subcommand is required (see --help)".into())
        }
        _ => CliError::Usage(one_line(&e)),
    })?;
    let command = match cli.command {
        CliCommand::Rerun { config } => {
            let text = fs::read_to_string(&config).map_err(|e| CliError::Io(config.clone(), e))?;
            let mut cfg = RunConfig::from_json(&text)?;
            if let Some(out) = cli.out {
                cfg.out = out;
            }
            if cli.threads.is_some() {
                cfg.threads = cli.threads;
            }
            return Ok(cfg);
        }
        CliCommand::Series { lambda, c, order } => Command::Series { lambda, c, order },
        CliCommand::Radius { lambda, theta, c, order } => Command::Radius { lambda, theta, c, order },
        CliCommand::Slice { lambda, window: w, mode } => {
            let mode = match mode {
                ModeArg::Classify => SliceMode::Classify,
                ModeArg::Equipotential => SliceMode::Equipotential,
                ModeArg::Both => SliceMode::Both,
            };
            Command::Slice { lambda, window: window(&w), mode }
        }
        CliCommand::Vslice { lambda, window: w } => Command::Vslice { lambda, window: window(&w) },
        CliCommand::Heightfield { lambda, window: w, order } => Command::Heightfield { lambda, window: window(&w), order },
        CliCommand::Zcurve { lambda, rays } => Command::Zcurve { lambda, rays },
        CliCommand::Parabolic { p, q } => Command::Parabolic { p, q },
        CliCommand::Converge { theta, depth, grid, half_width, order } => {
            Command::Converge { theta, depth, grid, half_width, order }
        }
    };
    Ok(RunConfig {
        command,
        out: cli.out.unwrap_or_else(|| PathBuf::from("out")),
        threads: cli.threads,
        seed: cli.seed.unwrap_or(DEFAULT_ROOT_SEED),
        supersample: cli.supersample,
        max_iter: cli.max_iter.unwrap_or(DEFAULT_MAX_ITER),
    })
}

fn one_line(e: &clap::Error) -> String {
    let rendered = e.render().to_string();
    let first = rendered.lines().next().unwrap_or("").trim_start_matches("error: ").trim_end_matches(':').to_string();
    match e.get(ContextKind::InvalidArg) {
        Some(arg) if !first.contains(&arg.to_string()) => format!("{first} {arg}"),
        _ => first,
    }
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::Io(path.clone(), e))?;
    Ok(path)
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s.into_bytes()
}

fn grid_spec(w: &Window, default_half_width: f64, coordinate: Coordinate) -> CliResult<GridSpec> {
    Ok(GridSpec::new(w.center, w.half_width.unwrap_or(default_half_width), w.resolution, coordinate)?)
}

fn write_image(dir: &Path, stem: &str, spec: &GridSpec, img: &SliceImage) -> CliResult<Vec<PathBuf>> {
    let n = spec.resolution;
    let mut written = vec![write(dir, &format!("{stem}.png"), &encode_png(n, n, &img.pixels)?)?];
    if let Some(raw) = &img.raw {
        written.push(write(dir, &format!("{stem}.slcf"), &Sidecar::from_field(spec, raw).encode())?);
    }
    written.push(write(dir, "legend.json", &json(&img.legend))?);
    Ok(written)
}

#[derive(Serialize)]
struct RadiusOut {
    r: f64,
    refined: f64,
    main: &'static str,
    phi_at_1: Complex64,
    phi_at_c: Complex64,
    uncertainty: f64,
    tolerance: f64,
}

#[derive(Serialize)]
struct NeutralRadiusOut {
    r: f64,
    log_r: f64,
    uncertainty: f64,
}

#[derive(Serialize)]
struct ParabolicOut {
    p: u64,
    q: u64,
    coeffs: Vec<Complex64>,
    roots_u: Vec<Complex64>,
    atoms_c: Vec<Complex64>,
    weight: f64,
}

fn run_command(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let dir = cfg.out.as_path();
    let opts = RenderOptions { max_iter: cfg.max_iter, supersample: cfg.supersample };
    match &cfg.command {
        Command::Series { lambda, c, order } => {
            let p = CubicSlicePoint::new(*lambda, *c)?;
            let (_, a2, a3) = p.coefficients();
            let seq = linearize(a2, a3, *lambda, *order)?;
            let mut csv = String::from("n,re,im,log_abs\n");
            for n in 1..=seq.order() {
                let b = seq.coeff(n);
                csv.push_str(&format!("{n},{},{},{}\n", b.re, b.im, seq.log_abs(n)));
            }
            Ok(vec![write(dir, "series.csv", csv.as_bytes())?])
        }
        Command::Radius { lambda: Some(lambda), c, order, .. } => {
            let p = CubicSlicePoint::new(*lambda, *c)?;
            let ropts = RadiusOptions {
                order: order.unwrap_or(DEFAULT_ORDER_ATTRACTING),
                max_iter: cfg.max_iter,
                ..RadiusOptions::default()
            };
            let rad = radius_attracting_with(&p, &ropts)?;
            let out = RadiusOut {
                r: rad.r,
                refined: rad.refined(),
                main: match rad.main {
                    MainCritical::CritOne => "1",
                    MainCritical::CritC => "c",
                    MainCritical::Both => "both",
                },
                phi_at_1: rad.phi_at_1,
                phi_at_c: rad.phi_at_c,
                uncertainty: rad.uncertainty(),
                tolerance: rad.tolerance_used,
            };
            Ok(vec![write(dir, "radius.json", &json(&out))?])
        }
        Command::Radius { lambda: None, theta, c, order } => {
            let theta = theta.as_deref().ok_or_else(|| CliError::Usage("one of --lambda, --theta is required".into()))?;
            let theta = parse_theta(theta)?;
            let slice = SiegelSlice::new(&theta, order.unwrap_or(DEFAULT_ORDER_NEUTRAL))?;
            let (log_r, uncertainty) = slice.log_r(*c)?;
            let out = NeutralRadiusOut { r: log_r.exp(), log_r, uncertainty };
            Ok(vec![write(dir, "radius.json", &json(&out))?])
        }
        Command::Slice { lambda, window, mode } => {
            let spec = grid_spec(window, 8.0, Coordinate::C)?;
            let img = render_slice(*lambda, &spec, *mode, &opts)?;
            write_image(dir, "slice", &spec, &img)
        }
        Command::Vslice { lambda, window } => {
            let spec = grid_spec(window, 8.0, Coordinate::V)?;
            let img = vslice(*lambda, &spec, &opts)?;
            write_image(dir, "vslice", &spec, &img)
        }
        Command::Heightfield { lambda, window, order } => {
            let spec = grid_spec(window, support_half_width(lambda.norm()), Coordinate::C)?;
            let h = heightfield(*lambda, &spec, *order)?;
            let n = spec.resolution;
            Ok(vec![
                write(dir, "heightfield.png", &encode_png(n, n, &h.pixels)?)?,
                write(dir, "heightfield.slcf", &Sidecar::from_field(&spec, &h.field).encode())?,
            ])
        }
        Command::Zcurve { lambda, rays } => {
            let mut csv = String::from("ray_index,re_c,im_c,re_psi,im_psi,flags\n");
            for pt in zcurve(*lambda, *rays)? {
                let flags = if pt.ambiguous { "ambiguous" } else { "" };
                csv.push_str(&format!("{},{},{},{},{},{flags}\n", pt.ray_index, pt.c.re, pt.c.im, pt.psi.re, pt.psi.im));
            }
            Ok(vec![write(dir, "zcurve.csv", csv.as_bytes())?])
        }
        Command::Parabolic { p, q } => {
            let poly = cq_poly(*p, *q)?;
            let report = cq_roots(&poly, cfg.seed)?;
            let measure = measure_from_roots(&report.roots);
            let out = ParabolicOut {
                p: *p,
                q: *q,
                weight: measure.weights[0],
                coeffs: poly.coeffs,
                roots_u: report.roots,
                atoms_c: measure.points,
            };
            Ok(vec![write(dir, "parabolic.json", &json(&out))?])
        }
        Command::Converge { theta, depth, grid, half_width, order } => {
            let theta = parse_theta(theta)?;
            let geometry = GridGeometry::nodes(Complex64::new(0.0, 0.0), *half_width, *grid)?;
            let report = convergence_table(&theta, *depth, &geometry, *order, &TestDictionary::default())?;
            let mut csv = String::from("p,q,sup_gap,weak_star_gap,u_n_at_zero,seconds\n");
            for r in &report.rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.p, r.q, r.sup_gap, r.weak_star_gap, r.u_n_at_zero, r.seconds
                ));
            }
            Ok(vec![write(dir, "converge.csv", csv.as_bytes())?])
        }
    }
}

/// Runs a configuration and writes `run.json` beside the outputs.
pub fn execute(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::Io(cfg.out.clone(), e))?;
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(v.parse::<usize>().map_err(|_| CliError::Usage(format!("{THREADS_ENV}={v} is not a count")))?),
        Err(_) => cfg.threads,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    let mut written = pool.install(|| run_command(cfg))?;
    written.push(write(&cfg.out, RUN_FILE, cfg.to_json().as_bytes())?);
    Ok(written)
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let outcome = parse_args(argv).and_then(|cfg| execute(&cfg));
    match outcome {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(CliError::Info(m)) => {
            print!("{m}");
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
