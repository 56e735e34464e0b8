//! Argument parsing, command dispatch and report output.
//!
//! Exit status: 0 when every check passed, 1 when a check found a
//! violation, 2 for malformed input or configuration.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use compass_core::cones_products::{cone_metric, cone_transfer_probe};
use compass_core::finite_metric::{certify_apexes, certify_curvature, curvature_gate, curvature_scan, CertificationReport};
use compass_core::gromov_hausdorff::{check_approximation, gh_bounds, gh_distance_exact, invert_approximation, PointMap};
use compass_core::jacobi_riccati::{compare_riccati, rauch_ratio, solve_riccati, CurvatureProfile, RauchKind, RiccatiInit, SolverOptions};
use compass_core::lattice_short_basis::{count_vs_bound, filtration_check, short_basis, torus_diameter, verify_geometry, FILTRATION_MAX_RANK};
use compass_core::model_space::{self, Hinge, TriangleSides, TriangleValidity};
use compass_core::semiconcave_flow::{contraction_report, gradient_curve, petrunin_report};
use compass_core::volume_comparison::{
    annulus_constant, bg_monotonicity_report, critical_separation, model_ball_volume, packing_multiplicity_bound, short_basis_bound,
    ShortBasisRegime,
};
use compass_core::{Curvature, DistanceMatrix, Report};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::formats::{self, fmt_f64, InputError, Result};
use crate::sample::{self, Space};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Upper limits that keep a single run bounded.
const MAX_TABLE_ROWS: usize = 10_000_000;
const MAX_SAMPLE_POINTS: usize = 2_000;
const MAX_CONSTANTS_N: u32 = 64;
const MAX_LATTICE_RANK: usize = 4;

#[derive(Parser, Debug)]
#[command(name = "compass", version, about = "Comparison-geometry checks on finite data")]
pub struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Tolerance for pass/fail decisions (command-specific default).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Write here (atomically) instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for quadruple enumeration.
    #[arg(long, global = true, env = "COMPASS_THREADS")]
    threads: Option<usize>,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Four-point curvature certification of a matrix or graph.
    #[command(allow_negative_numbers = true)]
    Certify(CertifyArgs),
    /// Gromov-Hausdorff distance, or a check of an ε-approximation.
    Gh(GhArgs),
    /// Table of comparison constants.
    #[command(allow_negative_numbers = true)]
    Constants(ConstantsArgs),
    /// Model-space trigonometry tables and triangles.
    #[command(allow_negative_numbers = true)]
    Model(ModelArgs),
    /// Riccati solutions and Rauch ratios for a curvature profile.
    #[command(allow_negative_numbers = true)]
    Riccati(RiccatiArgs),
    /// Short basis of a lattice.
    Shortbasis(ShortBasisArgs),
    /// Gradient curve of a piecewise-min function.
    #[command(allow_negative_numbers = true)]
    Flow(FlowArgs),
    /// Shortest-path matrix of a weighted graph.
    Ingest(IngestArgs),
    /// Bishop-Gromov monotonicity of a sampled volume curve.
    #[command(allow_negative_numbers = true)]
    Volume(VolumeArgs),
    /// Seeded sample matrix of a model space.
    Sample(SampleArgs),
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, conflicts_with = "scan")]
    kappa: Option<f64>,
    /// Comma-separated curvature grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    scan: Option<Vec<f64>>,
    /// Certify the cone over the input at these points instead.
    #[arg(long, conflicts_with_all = ["scan", "cone_probe"])]
    cone: Option<PathBuf>,
    /// Sampled cone diagnostic: input at κ = 1 against its cone at κ = 0.
    #[arg(long, conflicts_with_all = ["scan", "kappa"])]
    cone_probe: bool,
}

#[derive(Args, Debug)]
struct GhArgs {
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    /// Largest side for the exact search.
    #[arg(long, default_value_t = compass_core::gromov_hausdorff::DEFAULT_SIZE_LIMIT)]
    size_limit: usize,
    /// Map from left to right, checked as an ε-approximation.
    #[arg(long, requires = "eps")]
    map: Option<PathBuf>,
    #[arg(long, requires = "map")]
    eps: Option<f64>,
    /// Also build and check the inverse approximation.
    #[arg(long, requires = "map")]
    invert: bool,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    /// Dimension or inclusive range `a:b`.
    #[arg(long, default_value = "2")]
    n: String,
    /// Lower curvature bound for the curved short-basis constant.
    #[arg(long)]
    kappa: Option<f64>,
    /// Diameter bound.
    #[arg(long)]
    diameter: Option<f64>,
    /// Volume lower bound for the separation constants.
    #[arg(long)]
    volume: Option<f64>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("what").required(true).args(["table", "triangle", "hinge"])))]
struct ModelArgs {
    #[arg(long)]
    kappa: f64,
    /// `start:stop:step` grid for sn, cs, ct and md.
    #[arg(long)]
    table: Option<String>,
    /// Sides `a,b,c`; reports the three model angles.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    triangle: Option<Vec<f64>>,
    /// `angle,b,c`; reports the opposite side.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    hinge: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RauchArg {
    I,
    #[value(name = "II")]
    Ii,
}

#[derive(Args, Debug)]
struct RiccatiArgs {
    /// `const:K` or a CSV file of `(t, kappa)` rows.
    #[arg(long)]
    profile: String,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Constant curvature to compare against.
    #[arg(long)]
    model_kappa: Option<f64>,
    #[arg(long, value_enum, ignore_case = true, requires = "model_kappa")]
    rauch: Option<RauchArg>,
    /// Initial value of the Riccati solution, or `pole`.
    #[arg(long, default_value = "pole")]
    init: String,
}

#[derive(Args, Debug)]
struct ShortBasisArgs {
    #[arg(long)]
    input: PathBuf,
    /// Radii at which to compare the two length filtrations.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    radii: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct FlowArgs {
    #[arg(long = "fn")]
    function: PathBuf,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    from: Vec<f64>,
    #[arg(long = "T")]
    duration: f64,
    #[arg(long)]
    step: Option<f64>,
    /// Second start point, for the contraction check.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    to: Option<Vec<f64>>,
    /// Times `s,t` for the Petrunin estimate between the two start points.
    #[arg(long, value_delimiter = ',', num_args = 1, requires = "to")]
    petrunin: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct VolumeArgs {
    /// CSV of `(radius, volume)` rows.
    #[arg(long)]
    curve: PathBuf,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    kappa: f64,
    /// The curve consists of balls around one point.
    #[arg(long)]
    centered: bool,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long, value_enum)]
    space: Space,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long)]
    radius: Option<f64>,
}

/// A CSV table with `#` comment lines on top.
#[derive(Debug, Default)]
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    notes: Vec<String>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

enum Emit {
    Report { tolerance: f64, report: Value, table: Table, violation: bool },
    /// Plain data that other commands read back.
    Data { json: String, csv: String },
}

struct Ctx<'a> {
    global: &'a Global,
    hasher: Sha256,
    files: usize,
}

impl Ctx<'_> {
    fn read(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = formats::read_bytes(path)?;
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        self.files += 1;
        Ok(bytes)
    }

    fn tolerance(&self, default: f64) -> f64 {
        self.global.tolerance.unwrap_or(default)
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(InputError(format!("--{name} must be finite")))
    }
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(InputError(format!("--{name} must be positive and finite")))
    }
}

/// Parses and runs one invocation, writing the result to `out` (or the
/// `--output` file) and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let rendered = e.render().to_string();
            return if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                let _ = out.write_all(rendered.as_bytes());
                EXIT_PASS
            } else {
                let _ = err.write_all(rendered.as_bytes());
                EXIT_INPUT
            };
        }
    };
    match execute(&cli) {
        Ok((bytes, status)) => {
            let written = match &cli.global.output {
                Some(path) => write_atomic(path, &bytes),
                None => out.write_all(&bytes).map_err(|e| InputError(format!("standard output: {e}"))),
            };
            match written {
                Ok(()) => status,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_INPUT
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

/// Temp file in the target directory, then rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: &dyn std::fmt::Display| InputError(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(bytes).map_err(|e| fail(&e))?;
    tmp.as_file().sync_all().map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Certify(_) => "certify",
        Command::Gh(_) => "gh",
        Command::Constants(_) => "constants",
        Command::Model(_) => "model",
        Command::Riccati(_) => "riccati",
        Command::Shortbasis(_) => "shortbasis",
        Command::Flow(_) => "flow",
        Command::Ingest(_) => "ingest",
        Command::Volume(_) => "volume",
        Command::Sample(_) => "sample",
    }
}

fn execute(cli: &Cli) -> Result<(Vec<u8>, i32)> {
    let g = &cli.global;
    if let Some(t) = g.tolerance {
        positive("tolerance", t)?;
    }
    if g.threads == Some(0) {
        return Err(InputError("--threads must be at least 1".into()));
    }
    let mut ctx = Ctx { global: g, hasher: Sha256::new(), files: 0 };
    let emit = match &cli.command {
        Command::Certify(a) => certify(&mut ctx, a)?,
        Command::Gh(a) => gh(&mut ctx, a)?,
        Command::Constants(a) => constants(&ctx, a)?,
        Command::Model(a) => model(&ctx, a)?,
        Command::Riccati(a) => riccati(&mut ctx, a)?,
        Command::Shortbasis(a) => shortbasis(&mut ctx, a)?,
        Command::Flow(a) => flow(&mut ctx, a)?,
        Command::Ingest(a) => {
            let bytes = ctx.read(&a.input)?;
            let m = formats::parse_graph(&a.input, &bytes)?;
            Emit::Data { json: formats::matrix_json(&m), csv: formats::matrix_csv(&m) }
        }
        Command::Volume(a) => volume(&mut ctx, a)?,
        Command::Sample(a) => {
            if a.n == 0 || a.n > MAX_SAMPLE_POINTS {
                return Err(InputError(format!("--n must lie in 1..={MAX_SAMPLE_POINTS}")));
            }
            let r = positive("radius", a.radius.unwrap_or(a.space.default_radius()))?;
            let m = sample::generate(a.space, a.n, r, g.seed)?;
            Emit::Data { json: formats::matrix_json(&m), csv: formats::matrix_csv(&m) }
        }
    };
    let name = command_name(&cli.command);
    // arguments stand in for the input when no file was read
    if ctx.files == 0 {
        ctx.hasher.update(format!("{:?}", cli.command).as_bytes());
    }
    let digest: String = ctx.hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Ok(render(name, &digest, g.format, emit))
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    input_digest: &'a str,
    tolerance: f64,
    passed: bool,
    report: Value,
}

fn render(command: &str, digest: &str, format: Format, emit: Emit) -> (Vec<u8>, i32) {
    match emit {
        Emit::Data { json, csv } => (if format == Format::Json { json } else { csv }.into_bytes(), EXIT_PASS),
        Emit::Report { tolerance, report, table, violation } => {
            let status = if violation { EXIT_VIOLATION } else { EXIT_PASS };
            let bytes = match format {
                Format::Json => {
                    let env = Envelope {
                        tool: "compass",
                        version: env!("CARGO_PKG_VERSION"),
                        command,
                        input_digest: digest,
                        tolerance,
                        passed: !violation,
                        report,
                    };
                    let mut s = serde_json::to_string_pretty(&env).expect("envelope serializes");
                    s.push('\n');
                    s.into_bytes()
                }
                Format::Csv => {
                    let mut head = format!(
                        "# compass {} {command} tolerance={} input_sha256={digest} passed={}\n",
                        env!("CARGO_PKG_VERSION"),
                        fmt_f64(tolerance),
                        !violation
                    );
                    for n in &table.notes {
                        head.push_str("# ");
                        head.push_str(&n.replace('\n', " "));
                        head.push('\n');
                    }
                    let mut w = csv::Writer::from_writer(head.into_bytes());
                    w.write_record(&table.header).expect("in-memory write");
                    for r in &table.rows {
                        w.write_record(r).expect("in-memory write");
                    }
                    w.into_inner().expect("in-memory flush")
                }
            };
            (bytes, status)
        }
    }
}

fn read_metric(ctx: &mut Ctx<'_>, path: &Path) -> Result<DistanceMatrix> {
    let bytes = ctx.read(path)?;
    formats::parse_metric(path, &bytes)
}

/// Splits the apexes into chunks, certifies them on a pool and merges.
/// The merged report does not depend on the thread count.
pub fn certify_parallel(k: Curvature, m: &DistanceMatrix, tolerance: f64, threads: Option<usize>) -> Result<CertificationReport> {
    if curvature_gate(k, m).is_some() || m.len() < 8 {
        return Ok(certify_curvature(k, m, tolerance));
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| InputError(format!("thread pool: {e}")))?;
    let n = m.len();
    let parts = pool.install(|| (0..n).into_par_iter().map(|p| certify_apexes(k, m, tolerance, p..p + 1)).collect::<Vec<_>>());
    Ok(CertificationReport::merge(k, tolerance, parts))
}

fn certification_table(rep: &CertificationReport, labels: &[String]) -> Table {
    let mut t = Table::new(&["p", "a", "b", "c", "defect"]);
    t.note(format!("kappa={} checked={} violations={} skipped={}", fmt_f64(rep.kappa), rep.checked, rep.violations.len(), rep.skipped.len()));
    if let Some(g) = &rep.gate {
        t.note(format!("gate: {g:?}"));
    }
    for (q, d) in &rep.violations {
        let mut row: Vec<String> = [q.p, q.a, q.b, q.c].iter().map(|&i| labels[i].clone()).collect();
        row.push(fmt_f64(*d));
        t.push(row);
    }
    t
}

fn certify(ctx: &mut Ctx<'_>, a: &CertifyArgs) -> Result<Emit> {
    let m = read_metric(ctx, &a.input)?;
    let tolerance = ctx.tolerance(m.default_tolerance());
    if let Some(grid) = &a.scan {
        for &k in grid {
            finite("scan", k)?;
        }
        let scan = curvature_scan(&m, grid, tolerance)?;
        let mut t = Table::new(&["kappa", "passed", "checked", "violations", "skipped", "max_defect", "gate"]);
        t.note(format!("largest_passing={} non_monotone={}", opt(scan.largest_passing), scan.non_monotone));
        for r in &scan.rows {
            let gate = r.gate.as_ref().map(|g| format!("{g:?}")).unwrap_or_default();
            t.push(vec![
                fmt_f64(r.kappa),
                r.passed.to_string(),
                r.checked.to_string(),
                r.violations.to_string(),
                r.skipped.to_string(),
                fmt_f64(r.max_defect),
                gate,
            ]);
        }
        let violation = scan.largest_passing.is_none() || scan.non_monotone;
        return Ok(Emit::Report { tolerance, report: to_value(&scan), table: t, violation });
    }
    if a.cone_probe {
        let probe = cone_transfer_probe(&m, tolerance)?;
        let mut t = Table::new(&["space", "kappa", "passed", "checked", "violations", "max_defect"]);
        for (name, r) in [("sigma", &probe.sigma), ("cone", &probe.cone)] {
            t.push(vec![
                name.into(),
                fmt_f64(r.kappa),
                r.passed().to_string(),
                r.checked.to_string(),
                r.violations.len().to_string(),
                fmt_f64(r.max_defect),
            ]);
        }
        t.note(format!("anomaly={}", probe.anomaly));
        t.note("sampled diagnostic only; a pass does not certify the cone");
        return Ok(Emit::Report { tolerance, report: to_value(&probe), table: t, violation: probe.anomaly });
    }
    let k = Curvature(finite("kappa", a.kappa.unwrap_or(0.0))?);
    let (space, labels) = match &a.cone {
        Some(path) => {
            let bytes = ctx.read(path)?;
            let pts = formats::parse_cone_points(path, &bytes)?;
            let cone = cone_metric(&m, &pts)?;
            let labels = cone.matrix.labels().to_vec();
            (cone.matrix, labels)
        }
        None => {
            let labels = m.labels().to_vec();
            (m, labels)
        }
    };
    let rep = certify_parallel(k, &space, tolerance, ctx.global.threads)?;
    let table = certification_table(&rep, &labels);
    let mut report = to_value(&rep);
    report["labels"] = json!(labels);
    Ok(Emit::Report { tolerance, violation: !rep.passed(), report, table })
}

fn gh(ctx: &mut Ctx<'_>, a: &GhArgs) -> Result<Emit> {
    let x = read_metric(ctx, &a.left)?;
    let y = read_metric(ctx, &a.right)?;
    if let (Some(path), Some(eps)) = (&a.map, a.eps) {
        let eps = finite("eps", eps)?;
        if eps < 0.0 {
            return Err(InputError("--eps must be nonnegative".into()));
        }
        let bytes = ctx.read(path)?;
        let f = PointMap::new(&x, &y, formats::parse_assignment(path, &bytes)?)?;
        let check = check_approximation(&f, eps);
        let mut t = Table::new(&["check", "passed", "worst", "tolerance"]);
        t.push(vec!["approximation".into(), check.passed.to_string(), fmt_f64(check.worst), fmt_f64(check.tolerance)]);
        let mut violation = !check.passed;
        let mut report = json!({ "approximation": to_value(&check) });
        if a.invert && check.passed {
            let inv = invert_approximation(&f, eps)?;
            t.push(vec!["inverse".into(), inv.report.passed.to_string(), fmt_f64(inv.report.worst), fmt_f64(inv.report.tolerance)]);
            violation |= !inv.report.passed;
            report["inverse"] = json!({ "assignment": inv.map.assignment, "net": inv.net, "report": to_value(&inv.report) });
        }
        return Ok(Emit::Report { tolerance: eps, report, table: t, violation });
    }
    let (bound, exact) = match gh_distance_exact(&x, &y, a.size_limit) {
        Ok(b) => (b, true),
        Err(compass_core::Error::TooLarge { .. }) => (gh_bounds(&x, &y)?, false),
        Err(e) => return Err(e.into()),
    };
    let mut t = Table::new(&["lower", "upper", "exact"]);
    t.push(vec![fmt_f64(bound.lower), fmt_f64(bound.upper), exact.to_string()]);
    t.note(format!("lower bound from {}", bound.witness_lower));
    let mut report = to_value(&bound);
    report["exact"] = json!(exact);
    Ok(Emit::Report { tolerance: ctx.tolerance(0.0), report, table: t, violation: false })
}

fn parse_n_range(s: &str) -> Result<(u32, u32)> {
    let bad = || InputError(format!("--n expects `n` or `a:b`, got {s:?}"));
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if lo == 0 || lo > hi || hi > MAX_CONSTANTS_N {
        return Err(InputError(format!("--n range must satisfy 1 <= a <= b <= {MAX_CONSTANTS_N}")));
    }
    Ok((lo, hi))
}

#[derive(Serialize)]
struct ConstantsRow {
    n: u32,
    short_basis: Option<f64>,
    short_basis_curved: Option<f64>,
    packing: f64,
    annulus: Option<f64>,
    eps: Option<f64>,
    delta: Option<f64>,
}

fn constants(ctx: &Ctx<'_>, a: &ConstantsArgs) -> Result<Emit> {
    let (lo, hi) = parse_n_range(&a.n)?;
    let curved = match (a.kappa, a.diameter) {
        (Some(k), Some(d)) => {
            if k.is_nan() || k >= 0.0 {
                return Err(InputError("--kappa must be negative for the curved constant".into()));
            }
            Some(ShortBasisRegime::Curved { kappa: Curvature(k), diameter: positive("diameter", d)? })
        }
        (Some(_), None) => return Err(InputError("--kappa needs --diameter".into())),
        _ => None,
    };
    if let Some(d) = a.diameter {
        positive("diameter", d)?;
    }
    if let Some(v) = a.volume {
        positive("volume", v)?;
    }
    let mut rows = Vec::new();
    let mut t = Table::new(&["n", "C", "C_curved", "L", "c", "eps", "delta"]);
    for n in lo..=hi {
        let big = n >= 2;
        let sep = match (a.diameter, a.volume) {
            (Some(d), Some(v)) if big => Some(critical_separation(n, d, v)?),
            _ => None,
        };
        let row = ConstantsRow {
            n,
            short_basis: if big { Some(short_basis_bound(n, ShortBasisRegime::Nonnegative)?) } else { None },
            short_basis_curved: match curved {
                Some(r) if big => Some(short_basis_bound(n, r)?),
                _ => None,
            },
            packing: packing_multiplicity_bound(n)?,
            annulus: big.then(|| annulus_constant(n)),
            eps: sep.map(|s| s.0),
            delta: sep.map(|s| s.1),
        };
        t.push(vec![
            n.to_string(),
            opt(row.short_basis),
            opt(row.short_basis_curved),
            fmt_f64(row.packing),
            opt(row.annulus),
            opt(row.eps),
            opt(row.delta),
        ]);
        rows.push(row);
    }
    Ok(Emit::Report { tolerance: ctx.tolerance(0.0), report: json!({ "rows": to_value(&rows) }), table: t, violation: false })
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || InputError(format!("--table expects `start:stop:step`, got {s:?}"));
    let parts: Vec<f64> = s.split(':').map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    let [a, b, h] = parts[..] else { return Err(bad()) };
    if !(a.is_finite() && b.is_finite() && h > 0.0 && h.is_finite() && b >= a) {
        return Err(bad());
    }
    let count = ((b - a) / h + 1e-9).floor() + 1.0;
    if count.is_nan() || count > MAX_TABLE_ROWS as f64 {
        return Err(InputError(format!("--table would produce more than {MAX_TABLE_ROWS} rows")));
    }
    Ok((0..count as usize).map(|i| a + i as f64 * h).collect())
}

fn model(ctx: &Ctx<'_>, a: &ModelArgs) -> Result<Emit> {
    let k = Curvature(finite("kappa", a.kappa)?);
    let tolerance = ctx.tolerance(0.0);
    if let Some(spec) = &a.table {
        let grid = parse_grid(spec)?;
        let mut t = Table::new(&["t", "sn", "cs", "ct", "md"]);
        let mut rows = Vec::with_capacity(grid.len());
        for &x in &grid {
            let r = model_space::trig(k, x);
            let md = model_space::modified_distance(k, x);
            t.push([x, r.sn, r.cs, r.ct, md].iter().map(|v| fmt_f64(*v)).collect());
            rows.push(json!({ "t": x, "sn": r.sn, "cs": r.cs, "ct": r.ct, "md": md }));
        }
        return Ok(Emit::Report { tolerance, report: json!({ "kappa": k.0, "rows": rows }), table: t, violation: false });
    }
    if let Some(s) = &a.triangle {
        let [x, y, z] = s[..] else { return Err(InputError("--triangle expects three sides".into())) };
        let validity = model_space::validate_triangle(k, TriangleSides::new(x, y, z));
        let mut t = Table::new(&["side", "opposite_angle"]);
        let mut angles = Vec::new();
        if validity != TriangleValidity::Invalid {
            for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
                let ang = model_space::model_angle(k, a, b, c).ok();
                t.push(vec![fmt_f64(a), opt(ang)]);
                angles.push(ang);
            }
        }
        t.note(format!("validity={validity:?}"));
        let report = json!({ "kappa": k.0, "sides": [x, y, z], "validity": to_value(&validity), "angles": angles });
        return Ok(Emit::Report { tolerance, report, table: t, violation: false });
    }
    let Some([ang, b, c]) = a.hinge.as_deref().and_then(|h| <[f64; 3]>::try_from(h).ok()) else {
        return Err(InputError("--hinge expects angle,b,c".into()));
    };
    let side = model_space::model_side(k, Hinge::new(ang, b, c))?;
    let mut t = Table::new(&["angle", "b", "c", "side"]);
    t.push([ang, b, c, side].iter().map(|v| fmt_f64(*v)).collect());
    let report = json!({ "kappa": k.0, "hinge": { "angle": ang, "b": b, "c": c }, "side": side });
    Ok(Emit::Report { tolerance, report, table: t, violation: false })
}

fn profile(ctx: &mut Ctx<'_>, a: &RiccatiArgs) -> Result<CurvatureProfile> {
    if let Some(h) = a.horizon {
        positive("horizon", h)?;
    }
    if let Some(k) = a.profile.strip_prefix("const:") {
        let k = k.trim().parse::<f64>().ok().filter(|k| k.is_finite()).ok_or_else(|| InputError(format!("bad constant profile {:?}", a.profile)))?;
        let horizon = a.horizon.unwrap_or(if k > 0.0 { std::f64::consts::PI / k.sqrt() } else { 5.0 });
        return Ok(CurvatureProfile::constant(k, horizon));
    }
    let path = PathBuf::from(&a.profile);
    let bytes = ctx.read(&path)?;
    let p = formats::parse_profile(&path, &bytes)?;
    Ok(match a.horizon {
        Some(h) if h < p.horizon() => p.with_horizon(h),
        Some(_) => return Err(InputError("--horizon reaches past the last profile sample".into())),
        None => p,
    })
}

fn riccati(ctx: &mut Ctx<'_>, a: &RiccatiArgs) -> Result<Emit> {
    positive("step", a.step)?;
    let p = profile(ctx, a)?;
    let tolerance = ctx.tolerance(1e-9);
    let model = match a.model_kappa {
        Some(k) => Some(Curvature(finite("model-kappa", k)?)),
        None => None,
    };
    if let (Some(kind), Some(mk)) = (a.rauch, model) {
        let kind = match kind {
            RauchArg::I => RauchKind::RauchI,
            RauchArg::Ii => RauchKind::RauchII,
        };
        let run = rauch_ratio(&p, mk, kind, a.step, tolerance)?;
        let mut t = Table::new(&["t", "ratio"]);
        for (x, r) in run.times.iter().zip(&run.ratio) {
            t.push(vec![fmt_f64(*x), fmt_f64(*r)]);
        }
        t.note(format!("first_zero={} model_first_zero={}", opt(run.first_zero), opt(run.model_first_zero)));
        let violation = !run.report.passed;
        return Ok(Emit::Report { tolerance, report: to_value(&run), table: t, violation });
    }
    let init = match a.init.trim() {
        "pole" => RiccatiInit::PoleAtZero,
        s => RiccatiInit::Value(s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| InputError(format!("bad --init {s:?}")))?),
    };
    let opts = SolverOptions { tolerance, ..SolverOptions::default() };
    let sol = solve_riccati(&p, init, a.step, &opts)?;
    let mut t = Table::new(&["t", "value"]);
    for (x, v) in sol.grid.iter().zip(&sol.values) {
        t.push(vec![fmt_f64(*x), fmt_f64(*v)]);
    }
    t.note(format!("blowup_time={}", opt(sol.blowup_time)));
    let mut report = json!({ "solution": to_value(&sol) });
    let mut violation = false;
    if let Some(mk) = model {
        let lower = CurvatureProfile::constant(mk.0, p.horizon());
        let cmp = compare_riccati(&p, &lower, init, init, a.step, &opts)?;
        t.note(format!("comparison passed={} worst={}", cmp.passed, fmt_f64(cmp.worst)));
        violation = !cmp.passed;
        report["comparison"] = to_value(&cmp);
    }
    Ok(Emit::Report { tolerance, report, table: t, violation })
}

fn shortbasis(ctx: &mut Ctx<'_>, a: &ShortBasisArgs) -> Result<Emit> {
    let bytes = ctx.read(&a.input)?;
    let lat = formats::parse_lattice(&a.input, &bytes)?;
    if lat.rank() > MAX_LATTICE_RANK {
        return Err(compass_core::Error::RankTooLarge { rank: lat.rank(), max: MAX_LATTICE_RANK }.into());
    }
    if a.radii.is_some() && lat.rank() > FILTRATION_MAX_RANK {
        return Err(compass_core::Error::RankTooLarge { rank: lat.rank(), max: FILTRATION_MAX_RANK }.into());
    }
    let tolerance = ctx.tolerance(1e-12);
    let sb = short_basis(&lat);
    let diameter = torus_diameter(&lat, 16)?;
    let mut checks: Vec<Report> = vec![verify_geometry(&sb, tolerance)];
    if lat.rank() >= 2 {
        checks.push(count_vs_bound(&sb, lat.rank() as u32)?);
    }
    for &r in a.radii.iter().flatten() {
        checks.push(filtration_check(&lat, positive("radii", r)?)?);
    }
    let mut t = Table::new(&["index", "length", "coords", "vector"]);
    for i in 0..sb.len() {
        let join = |v: Vec<String>| v.join(" ");
        t.push(vec![
            i.to_string(),
            fmt_f64(sb.lengths[i]),
            join(sb.coords[i].iter().map(|c| c.to_string()).collect()),
            join(sb.vectors[i].iter().map(|c| fmt_f64(*c)).collect()),
        ]);
    }
    for c in &checks {
        t.note(format!("{} passed={} worst={}", c.check, c.passed, fmt_f64(c.worst)));
    }
    let violation = checks.iter().any(|c| !c.passed);
    let report = json!({ "short_basis": to_value(&sb), "torus_diameter": to_value(&diameter), "checks": to_value(&checks) });
    Ok(Emit::Report { tolerance, report, table: t, violation })
}

fn flow(ctx: &mut Ctx<'_>, a: &FlowArgs) -> Result<Emit> {
    let bytes = ctx.read(&a.function)?;
    let f = formats::parse_function(&a.function, &bytes)?;
    let duration = finite("T", a.duration)?;
    let step = match a.step {
        Some(s) => positive("step", s)?,
        None if duration > 0.0 => duration.min(0.01),
        None => 0.01,
    };
    if duration / step > MAX_TABLE_ROWS as f64 {
        return Err(InputError(format!("--T / --step exceeds {MAX_TABLE_ROWS} steps")));
    }
    let curve = gradient_curve(&f, &a.from, duration, step)?;
    let mut header = vec!["t".to_string()];
    header.extend((0..f.dim()).map(|i| format!("x{i}")));
    header.push("f".into());
    let mut t = Table { header, ..Default::default() };
    for ((x, p), v) in curve.times.iter().zip(&curve.points).zip(&curve.values) {
        let mut row = vec![fmt_f64(*x)];
        row.extend(p.iter().map(|c| fmt_f64(*c)));
        row.push(fmt_f64(*v));
        t.push(row);
    }
    t.note(format!("events={}", curve.events.iter().map(|e| fmt_f64(*e)).collect::<Vec<_>>().join(" ")));
    let tolerance = ctx.tolerance(1e-9);
    let mut report = json!({ "curve": to_value(&curve) });
    let mut violation = false;
    if let Some(q) = &a.to {
        let c = contraction_report(&f, &a.from, q, duration, step)?;
        t.note(format!("contraction passed={} worst={}", c.passed, fmt_f64(c.worst)));
        violation |= !c.passed;
        report["contraction"] = to_value(&c);
        if let Some(st) = &a.petrunin {
            let [s, u] = st[..] else { return Err(InputError("--petrunin expects s,t".into())) };
            if !(s >= 0.0 && u >= 0.0 && s.is_finite() && u.is_finite()) {
                return Err(InputError("--petrunin times must be nonnegative".into()));
            }
            let pr = petrunin_report(&f, &a.from, q, s, u, step)?;
            t.note(format!("petrunin passed={} worst={}", pr.passed, fmt_f64(pr.worst)));
            violation |= !pr.passed;
            report["petrunin"] = to_value(&pr);
        }
    }
    Ok(Emit::Report { tolerance, report, table: t, violation })
}

fn volume(ctx: &mut Ctx<'_>, a: &VolumeArgs) -> Result<Emit> {
    let bytes = ctx.read(&a.curve)?;
    let curve = formats::parse_volume_curve(&a.curve, &bytes)?;
    if a.n == 0 || a.n > MAX_CONSTANTS_N {
        return Err(InputError(format!("--n must lie in 1..={MAX_CONSTANTS_N}")));
    }
    let k = Curvature(finite("kappa", a.kappa)?);
    let tolerance = ctx.tolerance(1e-9);
    let rep = bg_monotonicity_report(&curve, a.n, k, a.centered, tolerance)?;
    let mut t = Table::new(&["radius", "volume", "model", "ratio"]);
    for (&r, &v) in curve.radii().iter().zip(curve.volumes()) {
        let m = model_ball_volume(a.n, k, r)?;
        t.push(vec![fmt_f64(r), fmt_f64(v), fmt_f64(m), if r > 0.0 { fmt_f64(v / m) } else { String::new() }]);
    }
    t.note(format!("passed={} worst={}", rep.passed, fmt_f64(rep.worst)));
    Ok(Emit::Report { tolerance, violation: !rep.passed, report: to_value(&rep), table: t })
}
