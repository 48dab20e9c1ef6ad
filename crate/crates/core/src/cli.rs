//! Batch front end: read CSV/JSON inputs, call the library, write results.
//!
//! Every command writes its primary result to stdout (or `--out`) as CSV or
//! as JSON `{"result": [[...]], "meta": {...}}`. Exit status is 0 on
//! success, 1 when the numbers violate a condition of the operation
//! (singular blocks, non-spanning frames, failed recovery) and 2 for
//! unreadable or inconsistent input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::frames::{self, FrameSystem};
use crate::irls::{self, IrlsOptions, IrlsResult};
use crate::matcore::io::{format_matrix_csv, format_real, format_vector_csv, parse_matrix, parse_vector};
use crate::matcore::{build_dft_matrix, Matrix, Vector, C64};
use crate::opfit::{self, ExperimentSet};
use crate::partition::{self, PartitionSpec};
use crate::pinv::{self, WeightMatrix};

/// Environment variable supplying `--tol` when the flag is absent.
pub const TOL_ENV: &str = "LPSOLVE_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Over,
    Under,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct Options {
    /// Target exponent for the IRLS commands
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Iteration count
    #[arg(long, global = true)]
    pub iters: Option<usize>,
    /// Homotopy factor applied to the running exponent
    #[arg(long, global = true)]
    pub homotopy: Option<f64>,
    /// Tolerance (rank cutoff, tightness, check threshold; see each command)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Regularization for the limit form of the pseudoinverse
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Diagonal weights, one per equation (tall) or unknown (wide)
    #[arg(long, global = true)]
    pub weights: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Per-iteration trace CSV for the IRLS commands
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Moore-Penrose pseudoinverse (with --delta: regularized limit form)
    Pinv { a: PathBuf },
    /// Case label of (A, b)
    Classify { a: PathBuf, b: PathBuf },
    /// x = A⁺b, or the weighted solution with --weights
    Solve { a: PathBuf, b: PathBuf },
    /// Iterative reweighted least squares (--mode over|under)
    Irls { a: PathBuf, b: PathBuf },
    /// Chebyshev solution of a tall system
    Minimax { a: PathBuf, b: PathBuf },
    /// Sparse solution of a wide system
    Sparse { a: PathBuf, b: PathBuf },
    /// Frame bounds of the columns of S
    Frame { s: PathBuf },
    /// Mixed known/unknown system from a JSON spec (F defaults to the DFT)
    Partition { spec: PathBuf, f: Option<PathBuf> },
    /// Spectrum with known support from time samples (JSON spec)
    SparseDft { spec: PathBuf },
    /// Band-limited signal from samples (JSON spec)
    SampleRecover { spec: PathBuf },
    /// Operator A with A·X = B from experiment matrices
    FitOp { x: PathBuf, b: PathBuf },
    /// Regression weights from inputs X and scalar outputs b
    Regress { x: PathBuf, b: PathBuf },
    /// Penrose residuals of pinv(A), or of a given candidate
    PenroseCheck { a: PathBuf, aplus: Option<PathBuf> },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Pinv { .. } => "pinv",
            Command::Classify { .. } => "classify",
            Command::Solve { .. } => "solve",
            Command::Irls { .. } => "irls",
            Command::Minimax { .. } => "minimax",
            Command::Sparse { .. } => "sparse",
            Command::Frame { .. } => "frame",
            Command::Partition { .. } => "partition",
            Command::SparseDft { .. } => "sparse-dft",
            Command::SampleRecover { .. } => "sample-recover",
            Command::FitOp { .. } => "fit-op",
            Command::Regress { .. } => "regress",
            Command::PenroseCheck { .. } => "penrose-check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "lpsolve", version, about = "Generalized inverses, L_p approximation, frames and partitioned solves")]
pub struct CommandConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

/// Result of one command, before formatting.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Matrix(Matrix),
    Vector(Vector),
    Label(String),
    /// Named scalar columns, written as a header line plus one value line.
    Table(Vec<(&'static str, Value)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub payload: Payload,
    pub meta: Map<String, Value>,
    pub trace: Option<String>,
}

impl Outcome {
    fn new(payload: Payload) -> Self {
        Self { payload, meta: Map::new(), trace: None }
    }

    fn meta(mut self, key: &str, value: Value) -> Self {
        self.meta.insert(key.to_string(), value);
        self
    }
}

fn tolerance(opts: &Options) -> Result<Option<f64>> {
    if let Some(t) = opts.tol {
        return Ok(Some(t));
    }
    match std::env::var(TOL_ENV) {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|_| Error::Parse { line: 1, msg: format!("{TOL_ENV}={s} is not a number") }),
        Err(_) => Ok(None),
    }
}

fn weights(opts: &Options) -> Result<Option<WeightMatrix>> {
    let Some(path) = &opts.weights else { return Ok(None) };
    let v = parse_vector(path)?;
    if !v.is_real() {
        return Err(Error::Domain("weights must be real".into()));
    }
    WeightMatrix::new(v.re()).map(Some)
}

fn irls_options(base: IrlsOptions, opts: &Options) -> IrlsOptions {
    let mut o = base;
    if let Some(p) = opts.p {
        o.p = p;
    }
    if let Some(k) = opts.iters {
        o.max_iters = k;
    }
    if let Some(h) = opts.homotopy {
        o.homotopy_factor = h;
    }
    o.trace = opts.trace.is_some();
    o
}

fn irls_outcome(r: IrlsResult) -> Outcome {
    let trace = (!r.trace.is_empty()).then(|| irls::trace_to_csv(&r.trace));
    let mut out = Outcome::new(Payload::Vector(r.x))
        .meta("iterations", json!(r.iterations))
        .meta("converged", json!(r.converged));
    out.trace = trace;
    out
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Number {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Number> for C64 {
    fn from(n: Number) -> C64 {
        match n {
            Number::Real(r) => C64::new(r, 0.0),
            Number::Complex([re, im]) => C64::new(re, im),
        }
    }
}

fn to_vector(vals: Vec<Number>) -> Result<Vector> {
    Vector::new(vals.into_iter().map(C64::from).collect())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartitionFile {
    n: usize,
    known_x_idx: Vec<usize>,
    known_y_idx: Vec<usize>,
    x_known: Vec<Number>,
    y_known: Vec<Number>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleFile {
    n: usize,
    sample_idx: Vec<usize>,
    #[serde(alias = "band_idx")]
    support_idx: Vec<usize>,
    samples: Vec<Number>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse { line: e.line().max(1), msg: e.to_string() })
}

/// Executes one command and returns its result without writing anything.
pub fn execute(config: &CommandConfig) -> Result<Outcome> {
    let opts = &config.options;
    let tol = tolerance(opts)?;
    match &config.command {
        Command::Pinv { a } => {
            let a = parse_matrix(a)?;
            match opts.delta {
                Some(delta) => {
                    Ok(Outcome::new(Payload::Matrix(pinv::limit_pinv(&a, delta)?)).meta("delta", json!(delta)))
                }
                None => {
                    let (p, route) = pinv::pinv_with_route(&a, tol)?;
                    Ok(Outcome::new(Payload::Matrix(p)).meta("route", json!(format!("{route:?}").to_lowercase())))
                }
            }
        }
        Command::Classify { a, b } => {
            let label = pinv::classify_case(&parse_matrix(a)?, &parse_vector(b)?, tol)?;
            Ok(Outcome::new(Payload::Label(label.code.as_str().to_string()))
                .meta("case", json!(label.code.as_str()))
                .meta("m", json!(label.m))
                .meta("n", json!(label.n))
                .meta("rank", json!(label.r))
                .meta("b_in_span", json!(label.b_in_span)))
        }
        Command::Solve { a, b } => {
            let (a, b) = (parse_matrix(a)?, parse_vector(b)?);
            let label = pinv::classify_case(&a, &b, None)?;
            let ap = match weights(opts)? {
                Some(w) if a.rows() >= a.cols() => pinv::weighted_pinv_over(&a, &w)?,
                Some(w) => pinv::weighted_pinv_under(&a, &w)?,
                None => pinv::pinv(&a, tol)?,
            };
            Ok(Outcome::new(Payload::Vector(ap.mul_vec(&b)?)).meta("case", json!(label.code.as_str())))
        }
        Command::Irls { a, b } => {
            let (a, b) = (parse_matrix(a)?, parse_vector(b)?);
            let mode = opts.mode.unwrap_or(if a.rows() >= a.cols() { Mode::Over } else { Mode::Under });
            let r = match mode {
                Mode::Over => irls::irls_over(&a, &b, &irls_options(IrlsOptions::over(opts.p.unwrap_or(10.0)), opts))?,
                Mode::Under => {
                    irls::irls_under(&a, &b, &irls_options(IrlsOptions::under(opts.p.unwrap_or(1.1)), opts))?
                }
            };
            Ok(irls_outcome(r))
        }
        Command::Minimax { a, b } => {
            let (a, b) = (parse_matrix(a)?, parse_vector(b)?);
            let r = irls::minimax_solve(&a, &b, &irls_options(IrlsOptions::minimax(), opts))?;
            let report = irls::check_minimax_characterization(&a, &b, &r.x, tol.unwrap_or(1e-3))?;
            let refined = r.refined;
            Ok(irls_outcome(r)
                .meta("max_error", json!(report.max_error))
                .meta("max_magnitude_errors", json!(report.num_max_magnitude_errors))
                .meta("characterized", json!(report.satisfies_characterization))
                .meta("refined", json!(refined)))
        }
        Command::Sparse { a, b } => {
            let (a, b) = (parse_matrix(a)?, parse_vector(b)?);
            let r = irls::sparse_solve_with(&a, &b, &irls_options(IrlsOptions::sparse(), opts))?;
            let refined = r.refined;
            Ok(irls_outcome(r).meta("refined", json!(refined)))
        }
        Command::Frame { s } => {
            let f = FrameSystem::new(parse_matrix(s)?)?;
            let r = frames::frame_bounds_with_tol(&f, tol.unwrap_or(frames::DEFAULT_TIGHT_TOL))?;
            Ok(Outcome::new(Payload::Table(vec![
                ("lower", json!(r.lower)),
                ("upper", json!(r.upper)),
                ("tight", json!(r.tight)),
                ("redundancy", json!(r.redundancy)),
                ("is_orthobasis", json!(r.is_orthobasis)),
            ])))
        }
        Command::Partition { spec, f } => {
            let file: PartitionFile = read_json(spec)?;
            let ps = PartitionSpec::new(file.n, file.known_x_idx, file.known_y_idx)?;
            let f = match f {
                Some(path) => parse_matrix(path)?,
                None => build_dft_matrix(file.n)?,
            };
            let (xk, yk) = (to_vector(file.x_known)?, to_vector(file.y_known)?);
            let sol = partition::partition_solve(&f, &ps, &xk, &yk)?;
            let x = sol.x(&ps, &xk);
            let y = sol.y(&ps, &yk);
            let xy = Matrix::from_columns(&[x, y])?;
            Ok(Outcome::new(Payload::Matrix(xy)).meta("k", json!(ps.k())))
        }
        Command::SparseDft { spec } => {
            let file: SampleFile = read_json(spec)?;
            let r =
                partition::sparse_dft_recover(&to_vector(file.samples)?, &file.sample_idx, &file.support_idx, file.n)?;
            Ok(Outcome::new(Payload::Vector(r.spectrum)).meta("solve_size", json!(r.solve_size)))
        }
        Command::SampleRecover { spec } => {
            let file: SampleFile = read_json(spec)?;
            let x = partition::bandlimited_reconstruct(
                &to_vector(file.samples)?,
                &file.sample_idx,
                &file.support_idx,
                file.n,
            )?;
            Ok(Outcome::new(Payload::Vector(x)))
        }
        Command::FitOp { x, b } => {
            let e = ExperimentSet::new(parse_matrix(x)?, parse_matrix(b)?)?;
            if e.inputs().is_square() {
                if let Ok(a) = opfit::fit_operator_exact(&e) {
                    return Ok(Outcome::new(Payload::Matrix(a)).meta("method", json!("exact")));
                }
            }
            let fit = opfit::fit_operator_ls(&e)?;
            Ok(Outcome::new(Payload::Matrix(fit.operator))
                .meta("method", json!("least_squares"))
                .meta("rank_deficient", json!(fit.rank_deficient)))
        }
        Command::Regress { x, b } => {
            let outputs = parse_vector(b)?;
            let e = ExperimentSet::new(parse_matrix(x)?, Matrix::new(1, outputs.len(), outputs.into_inner())?)?;
            Ok(Outcome::new(Payload::Vector(opfit::linear_regression(&e)?)))
        }
        Command::PenroseCheck { a, aplus } => {
            let a = parse_matrix(a)?;
            let candidate = match aplus {
                Some(path) => parse_matrix(path)?,
                None => pinv::pinv(&a, None)?,
            };
            let r = pinv::verify_penrose(&a, &candidate, tol.unwrap_or(1e-8))?;
            let [r1, r2, r3, r4] = r.residuals;
            Ok(Outcome::new(Payload::Table(vec![
                ("aapa", json!(r1)),
                ("apaap", json!(r2)),
                ("aap_hermitian", json!(r3)),
                ("apa_hermitian", json!(r4)),
                ("pass", json!(r.pass)),
            ])))
        }
    }
}

fn scalar_json(z: C64) -> Value {
    if z.im == 0.0 {
        json!(z.re)
    } else {
        json!([z.re, z.im])
    }
}

fn table_csv(cols: &[(&'static str, Value)]) -> String {
    let header: Vec<&str> = cols.iter().map(|c| c.0).collect();
    let values: Vec<String> = cols
        .iter()
        .map(|(_, v)| match v {
            Value::Number(n) => n.as_f64().map(format_real).unwrap_or_else(|| n.to_string()),
            other => other.to_string(),
        })
        .collect();
    format!("{}\n{}\n", header.join(","), values.join(","))
}

/// Renders an outcome in the requested format.
pub fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Csv => match &outcome.payload {
            Payload::Matrix(m) => format_matrix_csv(m),
            Payload::Vector(v) => format_vector_csv(v),
            Payload::Label(s) => format!("{s}\n"),
            Payload::Table(cols) => table_csv(cols),
        },
        Format::Json => {
            let result = match &outcome.payload {
                Payload::Matrix(m) => Value::Array(
                    (0..m.rows())
                        .map(|i| Value::Array((0..m.cols()).map(|j| scalar_json(m[(i, j)])).collect()))
                        .collect(),
                ),
                Payload::Vector(v) => Value::Array(v.iter().map(|&z| Value::Array(vec![scalar_json(z)])).collect()),
                Payload::Label(s) => json!([[s]]),
                Payload::Table(cols) => {
                    json!([cols.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>()])
                }
            };
            let mut meta = outcome.meta.clone();
            if let Payload::Table(cols) = &outcome.payload {
                meta.insert("columns".into(), json!(cols.iter().map(|c| c.0).collect::<Vec<_>>()));
            }
            let mut s = serde_json::to_string(&json!({ "result": result, "meta": meta }))
                .expect("JSON values always serialize");
            s.push('\n');
            s
        }
    }
}

/// Runs a command end to end: executes it, writes the trace file if
/// requested, and returns the rendered result (empty when written to `--out`).
pub fn run(config: &CommandConfig) -> Result<String> {
    let outcome = execute(config)?;
    let opts = &config.options;
    if let (Some(path), Some(trace)) = (&opts.trace, &outcome.trace) {
        write_file(path, trace)?;
    }
    let text = render(&outcome, opts.format);
    match &opts.out {
        Some(path) => {
            write_file(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_usage() {
        2
    } else {
        1
    }
}

/// One-line diagnostic for a failed command.
pub fn diagnostic(command: &str, err: &Error) -> String {
    let mut line = String::new();
    let _ = write!(line, "lpsolve {command}: {err}");
    line
}

/// Parses `args` (program name first), runs the command, prints the result
/// or a diagnostic, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CommandConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&config) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(err) => {
            eprintln!("{}", diagnostic(config.command.name(), &err));
            exit_code(&err)
        }
    }
}
