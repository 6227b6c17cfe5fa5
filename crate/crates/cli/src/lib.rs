//! The `exdual` command line: verification of single instances and
//! batteries, sample dumps, kernel tables and the self-test suite.
//!
//! Exit codes: 0 on success, 2 when a verification (or self-test) fails,
//! 1 on usage and domain errors.

pub mod output;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exdual::harness::{
    battery, battery_stream, random_instance, verify, DualityInstance, HarnessSettings, KindFamily, Methods,
};
use exdual::kernels::{dual_weight, ell, excursion_fdd, g_kernel, x_transition};
use exdual::mc::{sample_path, PathSource, SeededStream, MIN_REPLICATES};
use exdual::quad::QuadSettings;
use exdual::selftest::run_selftest;
use exdual::{ArgGrid, ProcessKind, TimeGrid};

use output::{destination, unix_timestamp, write_atomic, Destination};
use report::{
    density_csv, paths_csv, reports_csv, to_json, DensityDoc, DensityRow, Num, PathOut, ReportOut, SampleDoc, SweepDoc,
    Versions, VerifyDoc,
};

/// Stream offset of the Monte Carlo streams in a sweep; random instances
/// are generated on streams `0, 1, …` below it.
pub const SWEEP_MC_STREAM: u64 = 1 << 32;

#[derive(Debug, Parser)]
#[command(name = "exdual", version, about = "Verify the excursion / X-process Laplace-transform duality")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate both sides of one instance and compare them.
    Verify(VerifyArgs),
    /// Verify a battery of given and random instances.
    Sweep(SweepArgs),
    /// Dump sample paths of a process or of X.
    Sample(SampleArgs),
    /// Tabulate a kernel or weight on a grid.
    Density(DensityArgs),
    /// Run the property suite of every module.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Quad,
    Mc,
    Both,
}

impl MethodArg {
    fn methods(self) -> Methods {
        match self {
            Self::Quad => Methods::QUAD,
            Self::Mc => Methods::MC,
            Self::Both => Methods::BOTH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Excursion,
    Bessel,
    Beta,
    Nu,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionArg {
    /// X transition density p_t(x, y) over y.
    P,
    /// First-passage density ℓ_t(y) over y.
    Ell,
    /// Killed Brownian density g_t(x, y) over y.
    G,
    /// Excursion finite-dimensional density.
    Fdd,
    /// Dual weight of `--kind` over y.
    Weight,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Output file; `-` for stdout. Defaults to a file under $EXDUAL_OUTPUT_DIR, else stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum, default_value = "both")]
    pub method: MethodArg,
    /// Monte Carlo replicates per side.
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest admissible relative gap between the quadrature values.
    #[arg(long, default_value_t = 1e-6, allow_negative_numbers = true)]
    pub tol: f64,
    /// Largest admissible |z| in comparisons involving Monte Carlo.
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub z_max: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// excursion, meander, comeander, bessel:<delta>, beta:<alpha>,<beta> or nu:<v>:<w>[,...]
    #[arg(long, value_parser = parse_kind)]
    pub kind: ProcessKind,
    /// Increasing positive arguments s_1 < … < s_d, comma separated.
    #[arg(long = "s", value_parser = parse_arg_grid, allow_hyphen_values = true)]
    pub s: ArgGrid,
    /// Increasing times 0 ≤ t_1 < … < t_d ≤ 1, comma separated.
    #[arg(long = "t", value_parser = parse_time_grid, allow_hyphen_values = true)]
    pub t: TimeGrid,
    #[arg(long, default_value = "")]
    pub label: String,
    #[command(flatten)]
    pub eval: EvalArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// An instance `<kind>;<s>;<t>`, e.g. `beta:2,0.5;1,2;0.3,0.7`. Repeatable.
    #[arg(long = "case", value_parser = parse_case)]
    pub cases: Vec<DualityInstance>,
    /// Number of random instances to add.
    #[arg(long, default_value_t = 0)]
    pub random: u64,
    #[arg(long, default_value_t = 3)]
    pub d_max: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub kinds: Vec<FamilyArg>,
    #[command(flatten)]
    pub eval: EvalArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Process to sample on [0, 1].
    #[arg(long, value_parser = parse_kind, conflicts_with = "x0", required_unless_present = "x0")]
    pub kind: Option<ProcessKind>,
    /// Sample X started here instead; times are then elapsed times.
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long = "t", value_parser = parse_list, allow_hyphen_values = true)]
    pub t: List,
    /// Number of independent paths.
    #[arg(long, default_value_t = 1)]
    pub paths: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long = "function", value_enum)]
    pub function: FunctionArg,
    /// Elapsed time (p, ell, g) or the time grid (fdd).
    #[arg(long = "t", value_parser = parse_list, allow_hyphen_values = true)]
    pub t: Option<List>,
    /// Starting point (p, g).
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// Evaluation points.
    #[arg(long = "y", value_parser = parse_list, allow_hyphen_values = true)]
    pub y: List,
    /// Kind whose dual weight is tabulated (weight).
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<ProcessKind>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_kind(s: &str) -> Result<ProcessKind, String> {
    s.parse::<ProcessKind>().map_err(|e| e.to_string())
}

/// A comma-separated list of numbers given as one flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct List(pub Vec<f64>);

fn parse_numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("cannot parse '{}' as a number", x.trim())))
        .collect()
}

fn parse_list(s: &str) -> Result<List, String> {
    parse_numbers(s).map(List)
}

fn parse_arg_grid(s: &str) -> Result<ArgGrid, String> {
    ArgGrid::new(parse_numbers(s)?).map_err(|e| e.to_string())
}

fn parse_time_grid(s: &str) -> Result<TimeGrid, String> {
    TimeGrid::new(parse_numbers(s)?).map_err(|e| e.to_string())
}

fn parse_case(s: &str) -> Result<DualityInstance, String> {
    let parts: Vec<&str> = s.split(';').collect();
    let [kind, a, t] = parts[..] else {
        return Err(format!("expected '<kind>;<s>;<t>', got '{s}'"));
    };
    let kind = parse_kind(kind)?;
    let (a, t) = (parse_arg_grid(a)?, parse_time_grid(t)?);
    if a.len() != t.len() {
        return Err(format!("{} arguments but {} times", a.len(), t.len()));
    }
    DualityInstance::new(kind, a, t, s).map_err(|e| e.to_string())
}

/// A failure reported as one line on stderr with exit code 1.
#[derive(Debug)]
pub struct CliError(pub String);

impl From<exdual::Error> for CliError {
    fn from(e: exdual::Error) -> Self {
        CliError(e.to_string())
    }
}

type CliResult = Result<i32, CliError>;

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let text = e.render().to_string();
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("error: invalid arguments");
            let _ = writeln!(stderr, "{line}");
            return 1;
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout, stderr),
        Command::Sample(a) => cmd_sample(a, stdout),
        Command::Density(a) => cmd_density(a, stdout),
        Command::Selftest(a) => cmd_selftest(a, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(CliError(msg)) => {
            let line = msg.lines().next().unwrap_or("");
            let _ = writeln!(stderr, "error: {line}");
            1
        }
    }
}

fn emit(out: &OutputArgs, default_stem: &str, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    let name = format!("{default_stem}.{}", out.format.ext());
    match destination(out.output.as_deref(), &name) {
        Destination::Stdout => stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError(format!("--output: cannot write to stdout: {e}"))),
        Destination::File(p) => write_atomic(&p, text.as_bytes()).map_err(|e| CliError(format!("--output: cannot write {}: {e}", p.display()))),
    }
}

fn settings(e: &EvalArgs) -> Result<HarnessSettings, CliError> {
    if !(e.tol.is_finite() && e.tol > 0.0) {
        return Err(CliError(format!("--tol must be positive, got {}", e.tol)));
    }
    if !(e.z_max.is_finite() && e.z_max > 0.0) {
        return Err(CliError(format!("--z-max must be positive, got {}", e.z_max)));
    }
    if e.method != MethodArg::Quad && e.n < MIN_REPLICATES {
        return Err(CliError(format!("--n must be at least {MIN_REPLICATES} for Monte Carlo, got {}", e.n)));
    }
    Ok(HarnessSettings { quad: QuadSettings::default(), quad_threshold: e.tol, z_threshold: e.z_max })
}

fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> CliResult {
    if a.s.len() != a.t.len() {
        return Err(CliError(format!("--t has {} times but --s has {} arguments", a.t.len(), a.s.len())));
    }
    let hs = settings(&a.eval)?;
    let instance = DualityInstance::new(a.kind.clone(), a.s.clone(), a.t.clone(), a.label.clone())?;
    let stream = SeededStream::new(a.eval.seed, 0);
    let report = verify(&instance, a.eval.method.methods(), &hs, a.eval.n, stream)?;
    let out = ReportOut::new(&report, a.eval.seed, stream.stream_id);
    let timestamp = unix_timestamp();
    let text = match a.out.format {
        Format::Json => to_json(&VerifyDoc { report: out, timestamp }),
        Format::Csv => reports_csv(&[out], timestamp),
    };
    emit(&a.out, &format!("verify-{}", a.eval.seed), &text, stdout)?;
    Ok(if report.passed() { 0 } else { 2 })
}

fn families(kinds: &[FamilyArg]) -> Vec<KindFamily> {
    let mut out = Vec::new();
    for k in kinds {
        let add: &[KindFamily] = match k {
            FamilyArg::Excursion => &[KindFamily::Excursion],
            FamilyArg::Bessel => &[KindFamily::Bessel],
            FamilyArg::Beta => &[KindFamily::Beta],
            FamilyArg::Nu => &[KindFamily::DiscreteNu],
            FamilyArg::All => &KindFamily::ALL,
        };
        for f in add {
            if !out.contains(f) {
                out.push(*f);
            }
        }
    }
    out
}

fn cmd_sweep(a: &SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult {
    let hs = settings(&a.eval)?;
    let mut instances = a.cases.clone();
    let fams = families(&a.kinds);
    for i in 0..a.random {
        let inst = random_instance(SeededStream::new(a.eval.seed, i), a.d_max, &fams)
            .map_err(|e| CliError(format!("--d-max: {e}")))?;
        instances.push(inst);
    }
    if instances.is_empty() {
        return Err(CliError("--case or --random: a sweep needs at least one instance".into()));
    }
    let base = SeededStream::new(a.eval.seed, SWEEP_MC_STREAM);
    let results = battery(&instances, a.eval.method.methods(), &hs, a.eval.n, base);
    let mut reports = Vec::with_capacity(results.len());
    for (i, (r, inst)) in results.into_iter().zip(&instances).enumerate() {
        let r = r.map_err(|e| CliError(format!("instance '{}': {e}", inst.label)))?;
        reports.push(ReportOut::new(&r, a.eval.seed, battery_stream(base, i).stream_id));
    }
    let passed = reports.iter().filter(|r| r.verdict.pass).count();
    let total = reports.len();
    let timestamp = unix_timestamp();
    let text = match a.out.format {
        Format::Json => to_json(&SweepDoc { reports, passed, total, seed: a.eval.seed, versions: Versions::current(), timestamp }),
        Format::Csv => reports_csv(&reports, timestamp),
    };
    emit(&a.out, &format!("sweep-{}", a.eval.seed), &text, stdout)?;
    let _ = writeln!(stderr, "sweep: {passed}/{total} instances passed");
    Ok(if passed == total { 0 } else { 2 })
}

fn cmd_sample(a: &SampleArgs, stdout: &mut dyn Write) -> CliResult {
    let (source, label) = match (&a.kind, a.x0) {
        (Some(k), _) => (PathSource::Process { kind: k.clone() }, k.to_string()),
        (None, Some(x0)) => (PathSource::X { x0 }, format!("x:{x0}")),
        (None, None) => return Err(CliError("--kind or --x0 is required".into())),
    };
    if a.paths == 0 {
        return Err(CliError("--paths must be at least 1".into()));
    }
    let paths = (0..a.paths)
        .map(|i| {
            let p = sample_path(&source, &a.t.0, SeededStream::new(a.seed, i)).map_err(|e| CliError(format!("--t: {e}")))?;
            Ok(PathOut::new(&p, label.clone()))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let text = match a.out.format {
        Format::Json => to_json(&SampleDoc { paths, versions: Versions::current(), timestamp: unix_timestamp() }),
        Format::Csv => paths_csv(&paths),
    };
    emit(&a.out, &format!("sample-{}", a.seed), &text, stdout)?;
    Ok(0)
}

fn single_time(t: &Option<List>, f: &str) -> Result<f64, CliError> {
    match t.as_ref().map(|l| l.0.as_slice()) {
        Some([t]) => Ok(*t),
        Some(_) => Err(CliError(format!("--t takes a single elapsed time for --function {f}"))),
        None => Err(CliError(format!("--t is required for --function {f}"))),
    }
}

fn start_point(x: Option<f64>, f: &str) -> Result<f64, CliError> {
    x.ok_or_else(|| CliError(format!("--x is required for --function {f}")))
}

fn cmd_density(a: &DensityArgs, stdout: &mut dyn Write) -> CliResult {
    let y = &a.y.0;
    if y.is_empty() {
        return Err(CliError("--y needs at least one point".into()));
    }
    let tab = |f: &dyn Fn(f64) -> exdual::Result<f64>| -> Result<Vec<DensityRow>, CliError> {
        y.iter()
            .map(|&y| Ok(DensityRow { point: vec![Num(y)], value: Num(f(y).map_err(|e| CliError(format!("--y: {e}")))?) }))
            .collect()
    };
    let (name, params, rows) = match a.function {
        FunctionArg::P => {
            let (t, x) = (single_time(&a.t, "p")?, start_point(a.x, "p")?);
            ("p", vec![("t".into(), report::fmt_num(t)), ("x".into(), report::fmt_num(x))], tab(&|y| x_transition(t, x, y))?)
        }
        FunctionArg::Ell => {
            let t = single_time(&a.t, "ell")?;
            ("ell", vec![("t".into(), report::fmt_num(t))], tab(&|y| ell(t, y))?)
        }
        FunctionArg::G => {
            let (t, x) = (single_time(&a.t, "g")?, start_point(a.x, "g")?);
            ("g", vec![("t".into(), report::fmt_num(t)), ("x".into(), report::fmt_num(x))], tab(&|y| g_kernel(t, x, y))?)
        }
        FunctionArg::Fdd => {
            let List(t) = a.t.clone().ok_or_else(|| CliError("--t is required for --function fdd".into()))?;
            let grid = TimeGrid::new(t.clone()).map_err(|e| CliError(format!("--t: {e}")))?;
            let params = vec![("t".into(), t.iter().map(|x| report::fmt_num(*x)).collect::<Vec<_>>().join(";"))];
            let rows = if grid.len() == 1 {
                tab(&|y| excursion_fdd(&grid, &[y]))?
            } else if y.len() == grid.len() {
                let v = excursion_fdd(&grid, y).map_err(|e| CliError(format!("--y: {e}")))?;
                vec![DensityRow { point: y.iter().copied().map(Num).collect(), value: Num(v) }]
            } else {
                return Err(CliError(format!("--y needs {} values to match --t", grid.len())));
            };
            ("fdd", params, rows)
        }
        FunctionArg::Weight => {
            let kind = a.kind.clone().ok_or_else(|| CliError("--kind is required for --function weight".into()))?;
            ("weight", vec![("kind".into(), kind.to_string())], tab(&|y| dual_weight(&kind, y))?)
        }
    };
    let doc = DensityDoc { function: name.into(), parameters: params, rows, versions: Versions::current(), timestamp: unix_timestamp() };
    let text = match a.out.format {
        Format::Json => to_json(&doc),
        Format::Csv => density_csv(&doc),
    };
    emit(&a.out, &format!("density-{name}"), &text, stdout)?;
    Ok(0)
}

fn cmd_selftest(a: &SelftestArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult {
    let outcomes = run_selftest(a.seed);
    let failed: Vec<_> = outcomes.iter().filter(|c| !c.pass).collect();
    let text = match a.out.format {
        Format::Json => to_json(&outcomes),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["module", "name", "pass", "detail"]).expect("in-memory write");
            for c in &outcomes {
                w.write_record([c.module.as_str(), c.name.as_str(), if c.pass { "true" } else { "false" }, c.detail.as_str()])
                    .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
        }
    };
    emit(&a.out, &format!("selftest-{}", a.seed), &text, stdout)?;
    for c in &failed {
        let _ = writeln!(stderr, "FAIL {}::{}: {}", c.module, c.name, c.detail);
    }
    let _ = writeln!(stderr, "selftest: {}/{} checks passed", outcomes.len() - failed.len(), outcomes.len());
    Ok(if failed.is_empty() { 0 } else { 2 })
}

/// Runs `argv` in-process and returns (exit code, stdout, stderr).
pub fn run_captured<I, T>(argv: I) -> (i32, Vec<u8>, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut err);
    (code, out, String::from_utf8_lossy(&err).into_owned())
}

/// Drop the `timestamp` line of a pretty-printed JSON document.
pub fn strip_timestamp(json: &[u8]) -> Vec<u8> {
    let text = String::from_utf8_lossy(json);
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        if !line.trim_start().starts_with("\"timestamp\"") {
            out.push_str(line);
            out.push('\n');
        }
    }
    out.into_bytes()
}
