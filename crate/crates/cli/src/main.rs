//! `moduli`: compute modulus curves, run the verification suite and the
//! conjecture probes, and emit triangle figures as plot data.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or domain error, 3 I/O.

mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moduli::error::ModuliError;
use moduli::export::{curve_rows, curve_to_csv, curve_to_json};
use moduli::moduli::{modulus_curve, ModulusConfig, ModulusKind};
use moduli::norm::Norm;
use moduli::triangle::{build_figure, quasi_normals};
use moduli::verify::{
    default_suite, probe_conjectures, run_suite, select_checks, ProbeFamily, ProbePlan, Status, SuiteConfig,
};
use serde_json::json;

use input::{parse_norm, parse_range, InputError};

#[derive(Parser)]
#[command(name = "moduli", version, about = "Geometric moduli of two-dimensional normed planes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one modulus over a parameter range.
    Compute(ComputeArgs),
    /// Run the inequality checks and write a JSON report.
    Verify(VerifyArgs),
    /// Probe the open conjectures over a random norm family (report only).
    Probe(ProbeArgs),
    /// Emit a right-triangle figure and the unit sphere as plot data.
    Figure(FigureArgs),
}

#[derive(Args)]
struct Resolution {
    /// Angular grid points per full turn.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Refinement rounds around the best grid cells.
    #[arg(long)]
    refine_rounds: Option<usize>,
}

impl Resolution {
    fn apply(&self, base: ModulusConfig) -> ModulusConfig {
        let mut cfg = base;
        if let Some(n) = self.grid_n {
            cfg.grid_n = n;
        }
        if let Some(r) = self.refine_rounds {
            cfg.refinement.rounds = r;
        }
        cfg
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ComputeArgs {
    /// euclidean, lp:P, lp:inf, weighted-lp:P:W1,W2, regular:N, polygon:FILE or a norm JSON file.
    #[arg(long)]
    norm: String,
    /// Modulus name, e.g. zeta-plus or delta-t:0.25.
    #[arg(long)]
    modulus: String,
    /// Parameter range a:b:step, or a single value.
    #[arg(long)]
    eps: String,
    #[command(flatten)]
    resolution: Resolution,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Add the Euclidean closed form next to each value.
    #[arg(long)]
    with_hilbert: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Norms to check (repeatable); defaults to euclidean, lp:1, lp:1.5, lp:3, lp:inf and the regular 6- and 8-gons.
    #[arg(long)]
    norm: Vec<String>,
    /// Comma-separated check ids or id prefixes (`eq4` selects `eq4-…`).
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    /// Tolerance added to every modulus comparison.
    #[arg(long, default_value_t = 1e-3)]
    slack: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replace the default parameter grids (a:b:step).
    #[arg(long)]
    eps: Option<String>,
    /// Random figures per norm for the sampled checks.
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    resolution: Resolution,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    RandomPolygons,
    Lp,
    Mixed,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long, value_enum, default_value = "mixed")]
    family: Family,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parameter range a:b:step; defaults to 0.125:1:0.125.
    #[arg(long)]
    eps: Option<String>,
    /// Also probe the Euclidean plane, where every conjecture is an equality.
    #[arg(long)]
    include_euclidean: bool,
    #[command(flatten)]
    resolution: Resolution,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(long)]
    norm: String,
    /// Polar angle of the point x on the unit sphere.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta_x: f64,
    /// Polar angle of y; defaults to the first quasi-normal direction of x.
    #[arg(long, allow_hyphen_values = true)]
    y_angle: Option<f64>,
    #[arg(long)]
    eps: f64,
    /// Points of the sphere polyline.
    #[arg(long, default_value_t = 360)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Io(String),
}

impl From<ModuliError> for Failure {
    fn from(e: ModuliError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Usage(m) => Failure::Usage(m),
            InputError::Io(m) => Failure::Io(m),
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn to_json(v: &serde_json::Value) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Failure::Io(e.to_string()))
}

fn compute(a: ComputeArgs) -> Outcome {
    let norm = parse_norm(&a.norm)?;
    let kind: ModulusKind = a.modulus.parse()?;
    let grid = parse_range(&a.eps)?;
    let cfg = a.resolution.apply(ModulusConfig::default());
    let curve = modulus_curve(&norm, kind, &grid, &cfg)?;
    let text = match (a.format, a.with_hilbert) {
        (Format::Csv, h) => curve_to_csv(&curve, h)?,
        (Format::Json, false) => curve_to_json(&curve)?,
        (Format::Json, true) => {
            let hilbert: Vec<Option<f64>> = curve_rows(&curve, true)?.iter().map(|r| r.hilbert).collect();
            to_json(&json!({ "curve": curve, "hilbert": hilbert }))?
        }
    };
    emit(&a.out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn default_norms() -> Vec<Norm> {
    let p = |p: f64| Norm::lp(p).expect("valid exponent");
    let r = |n: usize| Norm::regular_polygon(n).expect("valid polygon");
    vec![Norm::euclidean(), p(1.0), p(1.5), p(3.0), p(f64::INFINITY), r(6), r(8)]
}

fn verify(a: VerifyArgs) -> Outcome {
    let norms = if a.norm.is_empty() {
        default_norms()
    } else {
        a.norm.iter().map(|n| parse_norm(n)).collect::<Result<_, _>>()?
    };
    if !(a.slack.is_finite() && a.slack >= 0.0) {
        return Err(Failure::Usage(format!("slack must be finite and ≥ 0, got {}", a.slack)));
    }
    let mut specs = default_suite(&norms, a.slack);
    if !a.checks.is_empty() {
        let names: Vec<&str> = a.checks.iter().map(String::as_str).collect();
        specs = select_checks(specs, &names)?;
    }
    if let Some(eps) = &a.eps {
        let grid = parse_range(eps)?;
        // sampled figure checks draw their own parameters
        specs.iter_mut().filter(|s| !s.eps_grid.is_empty()).for_each(|s| s.eps_grid = grid.clone());
    }
    let mut cfg =
        SuiteConfig { seed: a.seed, modulus: a.resolution.apply(ModulusConfig::default()), ..Default::default() };
    if let Some(n) = a.samples {
        cfg.figure_samples = n;
        cfg.convexity_samples = n;
    }
    let report = run_suite(&specs, &cfg)?;
    emit(&a.out, &report.to_json()?)?;
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::ReportOnly => "report-only",
            Status::Skipped => "skipped",
        };
        eprintln!("{status:>11}  {:<28} worst margin {:+.3e}", c.id, c.worst_margin);
    }
    Ok(if report.has_failures() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn probe(a: ProbeArgs) -> Outcome {
    let family = match a.family {
        Family::RandomPolygons => ProbeFamily::RandomPolygons,
        Family::Lp => ProbeFamily::Lp,
        Family::Mixed => ProbeFamily::Mixed,
    };
    let mut plan = ProbePlan::new(family, a.count as usize, a.seed);
    plan.include_euclidean = a.include_euclidean;
    plan.modulus = a.resolution.apply(plan.modulus);
    if let Some(eps) = &a.eps {
        plan.eps_grid = parse_range(eps)?;
    }
    let report = probe_conjectures(&plan)?;
    emit(&a.out, &report.to_json()?)?;
    Ok(ExitCode::SUCCESS)
}

fn figure(a: FigureArgs) -> Outcome {
    let norm = parse_norm(&a.norm)?;
    let x = norm.sphere_point_checked(a.theta_x)?;
    let y = match a.y_angle {
        Some(t) => norm.sphere_point_checked(t)?,
        None => quasi_normals(&norm, x)?.start,
    };
    let fig = build_figure(&norm, x, y, a.eps)?;
    if a.samples < 3 {
        return Err(Failure::Usage("the sphere polyline needs at least 3 samples".into()));
    }
    let sphere: Vec<_> =
        (0..=a.samples).map(|i| norm.sphere_point(std::f64::consts::TAU * i as f64 / a.samples as f64)).collect();
    let text = to_json(&json!({ "norm": norm, "figure": fig, "sphere": sphere }))?;
    emit(&a.out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("MODULI_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("MODULI_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot size the thread pool: {e}")))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let run = || -> Outcome {
        init_threads()?;
        match cli.command {
            Command::Compute(a) => compute(a),
            Command::Verify(a) => verify(a),
            Command::Probe(a) => probe(a),
            Command::Figure(a) => figure(a),
        }
    };
    match run() {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
