//! Command-line front end. `run` parses arguments, loads the system, runs the
//! requested analyses on a sized worker pool and writes a JSON report.
//!
//! Reports carry no timings or worker counts unless `--timings` is given, so
//! the same arguments always produce the same bytes.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::beta::{case_study_2_11_with, case_study_2_12_with, DirectionCaseStudy, RayCaseStudy};
use crate::error::{Error, Result};
use crate::hausdorff::{dimension_estimate_with, DimensionEstimate, EnumerationConfig, FiberMode};
use crate::model::{parse_spec, LabeledDigraph};
use crate::render::{
    box_count_series, raster_2d, square_count_bounds, voxel_export, BoxCountPoint,
};
use crate::spectral::{
    conjecture_probe, entropy_level, minkowski_dimension, shared_eigenvector_dimension,
    uniform_complexity_check, ConjectureProbe, LevelEntropy, MinkowskiResult,
    SharedEigenvectorResult, UniformComplexityCertificate,
};

pub const SCHEMA: &str = "sofic-report/1";

const DEFAULT_RENDER_DEPTH: usize = 4;
const DEFAULT_BOXCOUNT_DEPTH: usize = 24;
const BOUNDS_DEPTH: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "sofic",
    version,
    about = "Dimensions of sofic self-affine sponges"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// System document (JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    /// Report path; stdout when absent. `render` writes the image here instead.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 16)]
    pub nmax: usize,

    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,

    /// Digit depth for `render` (default 4) and `boxcount` (default 24).
    #[arg(long, global = true)]
    pub depth: Option<usize>,

    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Stopping tolerance of the truncated beta equations.
    #[arg(long, global = true, default_value_t = crate::beta::DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    /// Raster width for planar `render`.
    #[arg(long, global = true, default_value_t = 1024)]
    pub width: usize,

    #[arg(long, global = true, default_value_t = 1024)]
    pub height: usize,

    /// Maximum prefix nodes for the Hausdorff enumeration.
    #[arg(long, global = true, default_value_t = crate::hausdorff::DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,

    /// Embed wall-clock timings in the report (breaks byte-identity).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Parse, check right-resolvingness and summarize the presentation.
    Validate,
    Hausdorff,
    Minkowski,
    Entropy,
    /// Uniform-complexity certificate, shared-vector formula and conjecture probe (r = 2).
    UcCheck,
    /// Truncated beta-equation case studies for the two spatial examples.
    Beta,
    /// PGM raster (r = 2) or voxel CSV (r = 3) of the depth-k approximation.
    Render,
    Boxcount,
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Hausdorff => "hausdorff",
            Command::Minkowski => "minkowski",
            Command::Entropy => "entropy",
            Command::UcCheck => "uc-check",
            Command::Beta => "beta",
            Command::Render => "render",
            Command::Boxcount => "boxcount",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Surrogate,
}

impl From<ModeArg> for FiberMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => FiberMode::ExactFibers,
            ModeArg::Surrogate => FiberMode::NormSurrogate,
        }
    }
}

/// A report block: the value, or `{"value": null, "reason": ...}`.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Section<T> {
    Ready(T),
    Missing { value: (), reason: String },
}

impl<T> Section<T> {
    fn missing(reason: impl Into<String>) -> Self {
        Section::Missing {
            value: (),
            reason: reason.into(),
        }
    }

    pub fn ready(&self) -> Option<&T> {
        match self {
            Section::Ready(t) => Some(t),
            Section::Missing { .. } => None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct InputSummary {
    pub sha256: String,
    pub bases: Vec<u32>,
    pub vertices: usize,
    pub edges: usize,
    pub essential_vertices: usize,
}

#[derive(Debug, Serialize)]
pub struct Parameters {
    pub nmax: usize,
    pub mode: FiberMode,
    pub depth: Option<usize>,
    pub tolerance: f64,
    pub node_budget: u64,
}

#[derive(Debug, Serialize)]
pub struct Validation {
    pub right_resolving: bool,
    pub primitive: bool,
    pub primitivity_exponent: Option<usize>,
    pub level_alphabets: Vec<u32>,
}

#[derive(Debug, Serialize)]
pub struct UcBlock {
    pub certificate: UniformComplexityCertificate,
    pub shared_eigenvector: Section<SharedEigenvectorResult>,
    pub conjecture_probe: Section<ConjectureProbe>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum BetaBlock {
    DirectionClasses(DirectionCaseStudy),
    RayClasses(RayCaseStudy),
}

#[derive(Debug, Serialize)]
pub struct BoundsRow {
    pub k: usize,
    pub lower: String,
    pub count: String,
    pub upper: String,
    pub holds: bool,
}

#[derive(Debug, Serialize)]
pub struct BoxCountBlock {
    pub depth: usize,
    pub series: Vec<BoxCountPoint>,
    pub bounds: Vec<BoundsRow>,
}

#[derive(Debug, Serialize)]
pub struct RenderBlock {
    pub format: &'static str,
    pub depth: usize,
    pub path: String,
    pub cells: usize,
}

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub input: Option<InputSummary>,
    pub parameters: Option<Parameters>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation: Option<Validation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hausdorff: Option<Section<DimensionEstimate>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minkowski: Option<Section<MinkowskiResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<Section<Vec<LevelEntropy>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform_complexity: Option<Section<UcBlock>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Section<BetaBlock>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boxcount: Option<Section<BoxCountBlock>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub render: Option<RenderBlock>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub timings: Vec<(String, f64)>,
}

struct Runner<'a> {
    cli: &'a Cli,
    g: LabeledDigraph,
    timings: Vec<(String, f64)>,
    budget_hit: bool,
    /// Set when a single-analysis command fails outright.
    failure: Option<Error>,
}

impl Runner<'_> {
    fn timed<T>(&mut self, name: &str, f: impl FnOnce(&LabeledDigraph) -> Result<T>) -> Section<T> {
        log::info!("{name}: start");
        let t0 = Instant::now();
        let out = f(&self.g);
        let secs = t0.elapsed().as_secs_f64();
        log::info!("{name}: {secs:.3} s");
        self.timings.push((name.to_string(), secs));
        match out {
            Ok(v) => Section::Ready(v),
            Err(e) => {
                log::warn!("{name}: {e}");
                self.budget_hit |= e.is_budget();
                let reason = e.to_string();
                if self.cli.command != Command::All {
                    self.failure = Some(e);
                }
                Section::missing(reason)
            }
        }
    }

    fn hausdorff(&mut self) -> Section<DimensionEstimate> {
        let (n, mode) = (self.cli.nmax, self.cli.mode.into());
        let config = EnumerationConfig {
            node_budget: self.cli.node_budget,
        };
        self.timed("hausdorff", |g| dimension_estimate_with(g, n, mode, config))
    }

    fn minkowski(&mut self) -> Section<MinkowskiResult> {
        self.timed("minkowski", minkowski_dimension)
    }

    fn entropy(&mut self) -> Section<Vec<LevelEntropy>> {
        self.timed("entropy", |g| {
            (1..=g.dim()).map(|i| entropy_level(g, i)).collect()
        })
    }

    fn uc(&mut self) -> Section<UcBlock> {
        let n = self.cli.nmax;
        let certificate = match self.timed("uc-check", uniform_complexity_check) {
            Section::Ready(c) => c,
            Section::Missing { reason, .. } => return Section::missing(reason),
        };
        let shared = match shared_eigenvector_dimension(&self.g) {
            Ok(s) => Section::Ready(s),
            Err(e) => Section::missing(e.to_string()),
        };
        let probe = self.timed("conjecture-probe", |g| conjecture_probe(g, n));
        Section::Ready(UcBlock {
            certificate,
            shared_eigenvector: shared,
            conjecture_probe: probe,
        })
    }

    /// `estimate` is an exact-mode estimate at `--nmax` already computed by `all`.
    fn beta(&mut self, estimate: Option<f64>) -> Section<BetaBlock> {
        let (n, tol) = (self.cli.nmax, self.cli.tolerance);
        self.timed("beta", |g| {
            match case_study_2_11_with(g, n, tol, estimate) {
                Ok(d) => Ok(BetaBlock::DirectionClasses(d)),
                Err(Error::StructuralMismatch(first)) => {
                    match case_study_2_12_with(g, n, tol, estimate) {
                        Ok(r) => Ok(BetaBlock::RayClasses(r)),
                        Err(Error::StructuralMismatch(second)) => {
                            Err(Error::StructuralMismatch(format!(
                    "not a direction-class system ({first}); not a ray-class system ({second})"
                )))
                        }
                        Err(e) => Err(e),
                    }
                }
                Err(e) => Err(e),
            }
        })
    }

    fn boxcount(&mut self) -> Section<BoxCountBlock> {
        let depth = self.cli.depth.unwrap_or(DEFAULT_BOXCOUNT_DEPTH);
        self.timed("boxcount", |g| {
            let series = box_count_series(g, depth)?;
            let bounds = (1..=depth.min(BOUNDS_DEPTH))
                .map(|k| {
                    let b = square_count_bounds(g, k)?;
                    Ok(BoundsRow {
                        k,
                        holds: b.holds(),
                        lower: b.lower.to_string(),
                        count: b.count.to_string(),
                        upper: b.upper.to_string(),
                    })
                })
                .collect::<Result<_>>()?;
            Ok(BoxCountBlock {
                depth,
                series,
                bounds,
            })
        })
    }

    fn render(&mut self, out: &Path) -> Result<RenderBlock> {
        let depth = self.cli.depth.unwrap_or(DEFAULT_RENDER_DEPTH);
        let g = &self.g;
        let (format, bytes, cells) = match g.dim() {
            2 => {
                let raster = raster_2d(g, depth, self.cli.width, self.cli.height)?;
                let cells = crate::render::cells_at_depth(g, 2, depth)?.len();
                ("pgm", raster.to_pgm(), cells)
            }
            3 => {
                let csv = voxel_export(g, depth)?;
                let cells = csv.lines().count() - 1;
                ("voxel-csv", csv.into_bytes(), cells)
            }
            r => {
                return Err(Error::Unsupported(format!(
                    "render needs r = 2 or 3, got {r}"
                )))
            }
        };
        fs::write(out, bytes)?;
        Ok(RenderBlock {
            format,
            depth,
            path: out.display().to_string(),
            cells,
        })
    }
}

fn validation(g: &LabeledDigraph) -> Validation {
    let total = g.forward_prune().total_adjacency();
    let exponent = total.primitivity_exponent();
    Validation {
        right_resolving: true,
        primitive: exponent.is_some(),
        primitivity_exponent: exponent,
        level_alphabets: (1..=g.dim()).map(|i| g.bases().alphabet_size(i)).collect(),
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn load(path: &Path) -> Result<(LabeledDigraph, InputSummary)> {
    let raw = fs::read(path)?;
    let text = String::from_utf8(raw.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let g = parse_spec(&text)?;
    let summary = InputSummary {
        sha256: hex(&Sha256::digest(&raw)),
        bases: g.bases().as_slice().to_vec(),
        vertices: g.vertex_count(),
        edges: g.edges().len(),
        essential_vertices: g.forward_prune().vertex_count(),
    };
    Ok((g, summary))
}

fn exit_code(e: &Error) -> i32 {
    if e.is_budget() {
        2
    } else {
        1
    }
}

/// Builds the report for `cli`. Returns the report and the exit code.
pub fn execute(cli: &Cli) -> std::result::Result<(Report, i32), Error> {
    let input = cli
        .input
        .as_deref()
        .ok_or_else(|| Error::Unsupported("--input is required".into()))?;
    let (g, summary) = load(input)?;
    log::info!(
        "loaded {} ({} vertices, {} edges, bases {:?})",
        input.display(),
        summary.vertices,
        summary.edges,
        summary.bases
    );
    let mut report = Report {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        parameters: Some(Parameters {
            nmax: cli.nmax,
            mode: cli.mode.into(),
            depth: cli.depth,
            tolerance: cli.tolerance,
            node_budget: cli.node_budget,
        }),
        input: Some(summary),
        ..Report::default()
    };
    let mut run = Runner {
        cli,
        g,
        timings: Vec::new(),
        budget_hit: false,
        failure: None,
    };
    match cli.command {
        Command::Validate => report.validation = Some(validation(&run.g)),
        Command::Hausdorff => report.hausdorff = Some(run.hausdorff()),
        Command::Minkowski => report.minkowski = Some(run.minkowski()),
        Command::Entropy => report.entropy = Some(run.entropy()),
        Command::UcCheck => report.uniform_complexity = Some(run.uc()),
        Command::Beta => report.beta = Some(run.beta(None)),
        Command::Boxcount => report.boxcount = Some(run.boxcount()),
        Command::Render => {
            let out = cli
                .out
                .as_deref()
                .ok_or_else(|| Error::Unsupported("render needs --out".into()))?;
            report.render = Some(run.render(out)?);
        }
        Command::All => {
            report.validation = Some(validation(&run.g));
            report.minkowski = Some(run.minkowski());
            report.entropy = Some(run.entropy());
            report.hausdorff = Some(run.hausdorff());
            report.uniform_complexity = Some(if run.g.dim() == 2 {
                run.uc()
            } else {
                Section::missing(format!(
                    "uniform-complexity check covers r = 2 only, got r = {}",
                    run.g.dim()
                ))
            });
            let exact = match (&report.hausdorff, cli.mode) {
                (Some(Section::Ready(h)), ModeArg::Exact) => Some(h.estimate),
                _ => None,
            };
            report.beta = Some(if run.g.dim() == 3 {
                run.beta(exact)
            } else {
                Section::missing("beta case studies need a spatial system (r = 3)")
            });
            report.boxcount = Some(run.boxcount());
        }
    }
    if let Some(e) = run.failure {
        return Err(e);
    }
    if cli.timings {
        report.timings = run.timings;
    }
    let code = if run.budget_hit { 2 } else { 0 };
    Ok((report, code))
}

fn write_report(cli: &Cli, report: &Report) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    match (&cli.out, cli.command) {
        (Some(path), c) if c != Command::Render => fs::write(path, text)?,
        _ => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn workers(cli: &Cli) -> usize {
    cli.workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1)
}

/// Entry point for the binary. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(workers(&cli))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: worker pool: {e}");
            return 1;
        }
    };
    let outcome = pool.install(|| execute(&cli));
    match outcome {
        Ok((report, code)) => match write_report(&cli, &report) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
