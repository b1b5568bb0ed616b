//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a REJECT verdict.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog::{boundary_coordinate, extreme_first_column, extreme_kernel, BoundaryPoint, ExtInt, Family};
use crate::dims::{dimensions, extended_dimensions};
use crate::error::{Error, Result};
use crate::export::{self, RunMeta, DEFAULT_DIGITS};
use crate::float::martin_window_float;
use crate::kernel::{kernel_from_first_column, martin_kernel, martin_kernel_window, verify_harmonic, KernelArray};
use crate::lab::{
    discrete_boundary_check, martingale_experiment, path_kernel_sequence, phase_transition_sweep, KernelSource,
    PathSpec, Precision, SweepOptions,
};
use crate::markov::{backward_transition, check_monotone_in_kappa, marginal_law, sample_backward_path, LevelLaw};
use crate::moments::{invert_mixture, qpascal_cm_check, synthesize_mixture};
use crate::rational::{format_decimal, format_f64, format_q, parse_q, q, Q};
use crate::triangle::{MultiplicitySpec, NodeIndex, SpecFile};

pub const DIGITS_ENV: &str = "TRIBOUND_DIGITS";

#[derive(Debug, Parser)]
#[command(name = "tribound", version, about = "Boundary computations for weighted Pascal-like triangles")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// pascal | q-pascal | stirling | stirling-inf | eulerian | custom
    #[arg(long, global = true)]
    pub triangle: Option<String>,
    /// JSON triangle spec file.
    #[arg(long, global = true, conflicts_with = "triangle")]
    pub spec: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Left multiplicity expression in n,k (custom triangles).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub left: Option<String>,
    /// Right multiplicity expression in n,k (custom triangles).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub right: Option<String>,
    /// Swap the roles of left and right multiplicities.
    #[arg(long, global = true)]
    pub transpose: bool,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// exact | float | float:DIGITS | auto
    #[arg(long, global = true)]
    pub precision: Option<String>,
    /// Significant digits for decimal output.
    #[arg(long, global = true, env = DIGITS_ENV)]
    pub digits: Option<usize>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension table D_nk.
    Dims {
        #[arg(long)]
        depth: usize,
    },
    /// Extended dimensions D^{νκ}_nk toward a target.
    ExtDims {
        #[arg(long, value_parser = parse_node)]
        target: NodeIndex,
    },
    /// Martin kernel V^{νκ}.
    Kernel {
        #[arg(long, value_parser = parse_node)]
        target: NodeIndex,
        /// Restrict to levels up to this depth.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Closed-form extreme harmonic function.
    Extreme {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        depth: usize,
    },
    /// Check a kernel array for harmonicity.
    Verify {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Complete-monotonicity test of a first column.
    CmCheck {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        seq: Vec<String>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Multiplicities and dimensions of the transposed triangle.
    Transpose {
        #[arg(long)]
        depth: usize,
    },
    /// Backward transition law out of a node.
    Backtrans {
        #[arg(long, value_parser = parse_node)]
        node: NodeIndex,
    },
    /// Law of K_n under a harmonic function.
    Marginal {
        #[arg(long, conflicts_with = "kernel")]
        point: Option<String>,
        #[arg(long)]
        kernel: Option<PathBuf>,
        #[arg(long)]
        level: usize,
    },
    /// Backward trajectory from a node.
    Sample {
        #[arg(long, value_parser = parse_node)]
        start: NodeIndex,
    },
    /// Monotonicity of κ ↦ V^{νκ}_{n,0}.
    Monotone {
        #[arg(long)]
        nu: usize,
        #[arg(long)]
        level: usize,
    },
    /// Martin kernels along a boundary path.
    Sweep {
        #[arg(long)]
        path: String,
        #[arg(long)]
        window: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        nus: Vec<usize>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 3)]
        window_count: usize,
    },
    /// Mass kept on column m by the discrete boundary point m.
    DiscreteCheck {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        depth: usize,
    },
    /// Empirical convergence of V^{ν,K_ν} under P_V.
    Martingale {
        #[arg(long)]
        point: String,
        #[arg(long, value_delimiter = ',', required = true)]
        checkpoints: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Path sweeps across a parameter family.
    Phase {
        /// Parameter to vary: q or alpha.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<String>,
        #[arg(long)]
        path: String,
        #[arg(long)]
        window: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        nus: Vec<usize>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Convex combination of extreme kernels.
    Synth {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        points: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        weights: Vec<String>,
        #[arg(long)]
        depth: usize,
    },
    /// Mixing weights over boundary atoms.
    Invert {
        #[arg(long, value_delimiter = ',', conflicts_with = "kernel", allow_hyphen_values = true)]
        seq: Vec<String>,
        #[arg(long)]
        kernel: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Vec<String>,
        /// Pascal grid x = j/N, j = 0..=N.
        #[arg(long, conflicts_with = "points")]
        grid: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Dims { .. } => "dims",
            Command::ExtDims { .. } => "ext-dims",
            Command::Kernel { .. } => "kernel",
            Command::Extreme { .. } => "extreme",
            Command::Verify { .. } => "verify",
            Command::CmCheck { .. } => "cm-check",
            Command::Transpose { .. } => "transpose",
            Command::Backtrans { .. } => "backtrans",
            Command::Marginal { .. } => "marginal",
            Command::Sample { .. } => "sample",
            Command::Monotone { .. } => "monotone",
            Command::Sweep { .. } => "sweep",
            Command::DiscreteCheck { .. } => "discrete-check",
            Command::Martingale { .. } => "martingale",
            Command::Phase { .. } => "phase",
            Command::Synth { .. } => "synth",
            Command::Invert { .. } => "invert",
        }
    }
}

pub const SUBCOMMANDS: [&str; 17] = [
    "dims",
    "ext-dims",
    "kernel",
    "extreme",
    "verify",
    "cm-check",
    "transpose",
    "backtrans",
    "marginal",
    "sample",
    "monotone",
    "sweep",
    "discrete-check",
    "martingale",
    "phase",
    "synth",
    "invert",
];

fn parse_node(text: &str) -> std::result::Result<NodeIndex, String> {
    let t = text.trim().trim_start_matches('(').trim_end_matches(')');
    let (n, k) = t.split_once(',').ok_or("expected n,k")?;
    let n = n.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let k = k.trim().parse::<usize>().map_err(|e| e.to_string())?;
    NodeIndex::new(n, k).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct PrecisionMode {
    mode: Precision,
    digits: usize,
}

impl PrecisionMode {
    fn parse(text: Option<&str>, digits: Option<usize>) -> Result<PrecisionMode> {
        let default_digits = digits.unwrap_or(DEFAULT_DIGITS);
        let text = text.unwrap_or("auto");
        let (mode, digits) = match text.split_once(':') {
            Some(("float", d)) => (
                Precision::Float,
                d.parse().map_err(|_| Error::Invalid(format!("bad digit count `{d}`")))?,
            ),
            None => (
                match text {
                    "exact" => Precision::Exact,
                    "float" => Precision::Float,
                    "auto" => Precision::Auto,
                    _ => return Err(Error::Invalid(format!("unknown precision `{text}`"))),
                },
                default_digits,
            ),
            _ => return Err(Error::Invalid(format!("unknown precision `{text}`"))),
        };
        if !(1..=17).contains(&digits) {
            return Err(Error::Invalid("digits must lie in 1..=17".into()));
        }
        Ok(PrecisionMode { mode, digits })
    }

    fn label(&self) -> String {
        match self.mode {
            Precision::Exact => format!("exact (csv digits {})", self.digits),
            Precision::Float => format!("float:{}", self.digits),
            Precision::Auto => format!("auto (csv digits {})", self.digits),
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn build_triangle(c: &Common, fixed: Option<(&str, &str)>) -> Result<MultiplicitySpec> {
    let mut spec = match (&c.spec, &c.triangle) {
        (Some(path), _) => SpecFile::parse(&read_file(path)?)?,
        (None, Some(name)) => {
            let mut params = std::collections::BTreeMap::new();
            if let Some(v) = &c.q {
                params.insert("q".to_string(), v.clone());
            }
            if let Some(v) = &c.alpha {
                params.insert("alpha".to_string(), v.clone());
            }
            if let Some((k, v)) = fixed {
                params.insert(k.to_string(), v.to_string());
            }
            SpecFile {
                name: name.clone(),
                params,
                left: c.left.clone(),
                right: c.right.clone(),
                transpose: false,
            }
        }
        (None, None) => return Err(Error::Invalid("missing --triangle or --spec".into())),
    };
    spec.transpose ^= c.transpose;
    spec.build()
}

fn parse_seq(items: &[String]) -> Result<Vec<Q>> {
    items.iter().map(|s| parse_q(s)).collect()
}

/// Reads a kernel array, either bare or inside a `result` document.
fn load_kernel(path: &PathBuf) -> Result<KernelArray> {
    let v: Value = serde_json::from_str(&read_file(path)?).map_err(|e| Error::Invalid(format!("kernel file: {e}")))?;
    let candidates = [
        Some(&v),
        v.get("result"),
        v.get("result").and_then(|r| r.get("kernel")),
        v.get("kernel"),
    ];
    for c in candidates.into_iter().flatten() {
        if let Ok(k) = serde_json::from_value::<KernelArray>(c.clone()) {
            return Ok(k);
        }
    }
    Err(Error::Invalid(format!("{}: no kernel array found", path.display())))
}

fn law_csv(law: &LevelLaw, digits: usize) -> String {
    let mut out = String::from("k,probability\n");
    for (k, p) in law.probs.iter().enumerate() {
        out.push_str(&format!("{k},{}\n", format_decimal(p, digits)));
    }
    out
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("results serialize")
}

/// Body of a command: JSON result, CSV body, exit code.
struct Output {
    json: Value,
    csv: String,
    code: i32,
    sidecar: Option<Value>,
}

impl Output {
    fn ok(json: Value, csv: String) -> Output {
        Output {
            json,
            csv,
            code: 0,
            sidecar: None,
        }
    }
}

fn execute(cmd: &Command, tri: &MultiplicitySpec, c: &Common, prec: PrecisionMode) -> Result<Output> {
    let digits = prec.digits;
    Ok(match cmd {
        Command::Dims { depth } => {
            let d = dimensions(tri, *depth)?;
            Output::ok(to_json(&d), export::rows_csv(&d.rows, digits))
        }
        Command::ExtDims { target } => {
            let d = extended_dimensions(tri, *target)?;
            Output::ok(to_json(&d), export::rows_csv(&d.rows, digits))
        }
        Command::Kernel { target, depth } => {
            let depth = depth.unwrap_or(target.n);
            let exact = match prec.mode {
                Precision::Exact => true,
                Precision::Float => false,
                Precision::Auto => target.n <= crate::lab::AUTO_EXACT_LIMIT,
            };
            if exact {
                let v = if depth == target.n {
                    martin_kernel(tri, *target)?
                } else {
                    martin_kernel_window(tri, *target, depth)?
                };
                Output::ok(
                    json!({ "target": target, "exact": true, "kernel": v }),
                    export::rows_csv(&v.rows, digits),
                )
            } else {
                let w = martin_window_float(tri, *target, depth.min(target.n))?;
                let rows: Vec<Vec<String>> =
                    w.rows.iter().map(|r| r.iter().map(|x| format_f64(*x, digits)).collect()).collect();
                Output::ok(
                    json!({ "target": target, "exact": false, "rel_error": w.rel_error, "rows": rows }),
                    export::float_rows_csv(&w.rows, digits),
                )
            }
        }
        Command::Extreme { point, depth } => {
            let p = BoundaryPoint::parse(point, tri)?;
            let v = extreme_kernel(tri, &p, *depth)?;
            let coord = if *depth >= 1 {
                Some(format_q(&boundary_coordinate(tri, &v)?))
            } else {
                None
            };
            Output::ok(
                json!({ "point": p.to_string(), "coordinate": coord, "kernel": v }),
                export::rows_csv(&v.rows, digits),
            )
        }
        Command::Verify { kernel, depth } => {
            let v = load_kernel(kernel)?;
            let report = verify_harmonic(tri, &v, depth.unwrap_or(v.depth))?;
            let mut csv = String::from("n,k,residual\n");
            for viol in &report.violations {
                csv.push_str(&format!("{},{},{}\n", viol.node.n, viol.node.k, format_decimal(&viol.residual, digits)));
            }
            let code = if report.is_clean() { 0 } else { 2 };
            Output {
                json: json!({ "clean": report.is_clean(), "report": report }),
                csv,
                code,
                sidecar: None,
            }
        }
        Command::CmCheck { seq, depth } => {
            let col = parse_seq(seq)?;
            if col.is_empty() {
                return Err(Error::Invalid("empty sequence".into()));
            }
            let depth = depth.unwrap_or(col.len() - 1);
            if col.len() <= depth {
                return Err(Error::LengthMismatch {
                    expected: depth + 1,
                    got: col.len(),
                });
            }
            let qpascal = match Family::of(tri) {
                Some(Family::QPascal(qv)) if qv < Q::from_integer(1.into()) => Some(qv),
                _ => None,
            };
            let (verdict, kernel, cross) = match qpascal {
                Some(qv) => {
                    let r = qpascal_cm_check(&qv, &col, depth)?;
                    (r.verdict, r.kernel, r.cross_check)
                }
                None => {
                    let (k, v) = kernel_from_first_column(tri, &col[..=depth], depth)?;
                    (v, k, None)
                }
            };
            let code = if verdict.accepted { 0 } else { 2 };
            Output {
                json: json!({
                    "verdict": verdict.to_string(),
                    "accepted": verdict.accepted,
                    "first_negative": verdict.first_negative,
                    "depth": verdict.depth,
                    "kernel": kernel,
                    "cross_check": cross.as_ref().map(export::measure_diagnostics),
                }),
                csv: format!("# verdict={verdict}\n{}", export::rows_csv(&kernel.rows, digits)),
                code,
                sidecar: None,
            }
        }
        Command::Transpose { depth } => {
            let t = tri.transpose();
            let left = (0..=*depth)
                .map(|n| (0..=n).map(|k| t.left(n, k)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let right = (0..=*depth)
                .map(|n| (0..=n).map(|k| t.right(n, k)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let d = dimensions(&t, *depth)?;
            let rows = |r: &Vec<Vec<Q>>| -> Vec<Vec<String>> { r.iter().map(|x| x.iter().map(format_q).collect()).collect() };
            Output::ok(
                json!({ "triangle": t.describe(), "left": rows(&left), "right": rows(&right), "dims": d }),
                export::rows_csv(&d.rows, digits),
            )
        }
        Command::Backtrans { node } => {
            let d = dimensions(tri, node.n)?;
            let law = backward_transition(tri, &d, node.n, node.k)?;
            Output::ok(json!({ "from": node, "law": law }), law_csv(&law, digits))
        }
        Command::Marginal { point, kernel, level } => {
            let v = match (point, kernel) {
                (Some(p), _) => extreme_kernel(tri, &BoundaryPoint::parse(p, tri)?, *level)?,
                (None, Some(path)) => load_kernel(path)?,
                (None, None) => return Err(Error::Invalid("marginal needs --point or --kernel".into())),
            };
            let d = dimensions(tri, *level)?;
            let law = marginal_law(tri, &d, &v, *level)?;
            Output::ok(json!({ "law": law }), law_csv(&law, digits))
        }
        Command::Sample { start } => {
            let d = dimensions(tri, start.n)?;
            let t = sample_backward_path(tri, &d, *start, c.seed)?;
            let levels: Vec<Value> = (0..=start.n).map(|n| json!([n, t.at_level(n)])).collect();
            Output::ok(
                json!({ "start": start, "trajectory": levels }),
                export::trajectory_csv(&t),
            )
        }
        Command::Monotone { nu, level } => {
            let r = check_monotone_in_kappa(tri, *nu, *level)?;
            let mut csv = String::from("kappa,value\n");
            for (kappa, v) in r.values.iter().enumerate() {
                csv.push_str(&format!("{kappa},{}\n", format_decimal(v, digits)));
            }
            let code = if r.is_monotone() { 0 } else { 2 };
            Output {
                json: json!({ "monotone": r.is_monotone(), "report": r }),
                csv,
                code,
                sidecar: None,
            }
        }
        Command::Sweep {
            path,
            window,
            nus,
            tol,
            window_count,
        } => {
            let path: PathSpec = path.parse()?;
            let opts = SweepOptions {
                precision: prec.mode,
                tol: *tol,
                window_count: *window_count,
            };
            let trace = path_kernel_sequence(tri, &path, *window, nus, opts)?;
            let mut blob = export::trace_verdict_json(&trace);
            blob["samples"] = to_json(&trace.samples);
            Output::ok(blob, export::trace_csv(&trace, digits))
        }
        Command::DiscreteCheck { m, depth } => {
            let make: Box<dyn Fn(usize) -> BoundaryPoint> = match Family::of(tri) {
                Some(Family::QPascal(_)) => Box::new(|m| BoundaryPoint::QPascalM(ExtInt::Finite(m as i64))),
                Some(Family::Stirling(_)) | Some(Family::StirlingInf) => {
                    Box::new(|m| BoundaryPoint::StirlingM(ExtInt::Finite(m as i64)))
                }
                _ => return Err(Error::Invalid("discrete-check needs a q-pascal or stirling triangle".into())),
            };
            let fam = |m: usize, depth: usize| extreme_kernel(tri, &make(m), depth);
            let tr = discrete_boundary_check(tri, &fam, *m, *depth)?;
            let mut csv = String::from("n,mass,distance\n");
            for ((n, v), dist) in tr.values.iter().zip(tr.distances()) {
                csv.push_str(&format!("{n},{},{}\n", format_decimal(v, digits), format_decimal(&dist, digits)));
            }
            let distances: Vec<String> = tr.distances().iter().map(format_q).collect();
            Output::ok(
                json!({ "trace": tr, "distances": distances, "increasing": tr.is_increasing() }),
                csv,
            )
        }
        Command::Martingale {
            point,
            checkpoints,
            trials,
        } => {
            let p = BoundaryPoint::parse(point, tri)?;
            let stats = martingale_experiment(tri, &KernelSource::Extreme(p), checkpoints, *trials, c.seed)?;
            let mut csv = String::from("nu,mean_deviation,max_deviation\n");
            for s in &stats.checkpoints {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    s.nu,
                    format_f64(s.mean_deviation, digits),
                    format_f64(s.max_deviation, digits)
                ));
            }
            Output::ok(to_json(&stats), csv)
        }
        Command::Phase {
            param,
            values,
            path,
            window,
            nus,
            tol,
        } => {
            if param != "q" && param != "alpha" {
                return Err(Error::Invalid(format!("unknown family parameter `{param}`")));
            }
            let name = c
                .triangle
                .clone()
                .ok_or_else(|| Error::Invalid("phase needs --triangle".into()))?;
            let path: PathSpec = path.parse()?;
            let params = parse_seq(values)?;
            let transpose = c.transpose;
            let family = |v: &Q| {
                let t = crate::catalog::catalog_triangle(&name, &[(param.clone(), v.clone())])?;
                Ok(if transpose { t.transpose() } else { t })
            };
            let opts = SweepOptions {
                precision: prec.mode,
                tol: *tol,
                window_count: 3,
            };
            let rows = phase_transition_sweep(&family, &params, &|_| path.clone(), *window, nus, opts)?;
            let mut csv = String::from("param,verdict");
            for n in 0..=*window {
                csv.push_str(&format!(",v{n}0"));
            }
            csv.push('\n');
            for r in &rows {
                csv.push_str(&format!("{},{}", r.param, r.verdict));
                for v in &r.first_column {
                    csv.push_str(&format!(",{}", format_f64(*v, digits)));
                }
                csv.push('\n');
            }
            Output::ok(json!({ "param": param, "rows": rows }), csv)
        }
        Command::Synth { points, weights, depth } => {
            let ks = points
                .iter()
                .map(|p| extreme_kernel(tri, &BoundaryPoint::parse(p, tri)?, *depth))
                .collect::<Result<Vec<_>>>()?;
            let v = synthesize_mixture(&ks, &parse_seq(weights)?)?;
            Output::ok(json!({ "kernel": v }), export::rows_csv(&v.rows, digits))
        }
        Command::Invert {
            seq,
            kernel,
            points,
            grid,
            depth,
        } => {
            let col = match kernel {
                Some(path) => load_kernel(path)?.first_column(),
                None => parse_seq(seq)?,
            };
            if col.is_empty() {
                return Err(Error::Invalid("invert needs --seq or --kernel".into()));
            }
            let atoms: Vec<BoundaryPoint> = match grid {
                Some(n) if *n > 0 => (0..=*n as i64).map(|j| BoundaryPoint::PascalX(q(j, *n as i64))).collect(),
                Some(_) => return Err(Error::Invalid("grid size must be positive".into())),
                None => points
                    .iter()
                    .map(|p| BoundaryPoint::parse(p, tri))
                    .collect::<Result<Vec<_>>>()?,
            };
            // reject grid atoms on a non-Pascal triangle up front
            for a in &atoms {
                extreme_first_column(tri, a, 0)?;
            }
            let depth = depth.unwrap_or(col.len() - 1);
            let m = invert_mixture(tri, &col, &atoms, depth)?;
            let diag = export::measure_diagnostics(&m);
            Output {
                json: json!({ "measure": export::measure_json(&m), "diagnostics": diag }),
                csv: export::measure_csv(&m, digits),
                code: 0,
                sidecar: Some(diag),
            }
        }
    })
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::Invalid(format!("write failed: {e}")))
}

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let first = e.to_string();
                    let line = first.lines().next().unwrap_or("invalid arguments");
                    let _ = writeln!(stderr, "{line}");
                    1
                }
            };
        }
    };
    match run_parsed(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

fn run_parsed(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let c = &cli.common;
    let prec = PrecisionMode::parse(c.precision.as_deref(), c.digits)?;
    // a phase sweep varies one parameter; label the run by its first value
    let fixed = match &cli.command {
        Command::Phase { param, values, .. } => values.first().map(|v| (param.as_str(), v.as_str())),
        _ => None,
    };
    let tri = build_triangle(c, fixed)?;
    let meta = RunMeta {
        command: cli.command.name().to_string(),
        triangle: tri.describe(),
        seed: c.seed,
        precision: prec.label(),
    };
    let output = match c.jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Internal(e.to_string()))?;
            pool.install(|| execute(&cli.command, &tri, c, prec))?
        }
        None => execute(&cli.command, &tri, c, prec)?,
    };
    let text = match c.format {
        Format::Json => export::json_document(&meta, output.json),
        Format::Csv => format!("{}{}", meta.csv_header(), output.csv),
    };
    match &c.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
            if let Some(diag) = output.sidecar {
                let mut side = path.clone().into_os_string();
                side.push(".diagnostics.json");
                std::fs::write(&side, export::json_document(&meta, diag))
                    .map_err(|e| Error::Invalid(format!("{}: {e}", PathBuf::from(side).display())))?;
            }
        }
        None => emit(stdout, &text)?,
    }
    Ok(output.code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn go(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("tribound").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn subcommand_list_matches_parser() {
        let cmd = Cli::command();
        let names: Vec<&str> = cmd.get_subcommands().map(|s| s.get_name()).collect();
        assert_eq!(names, SUBCOMMANDS);
    }

    #[test]
    fn node_syntax() {
        assert_eq!(parse_node("(4,2)").unwrap(), NodeIndex { n: 4, k: 2 });
        assert!(parse_node("2,4").is_err());
        assert!(parse_node("4").is_err());
    }

    #[test]
    fn precision_modes() {
        assert_eq!(PrecisionMode::parse(Some("float:8"), None).unwrap().digits, 8);
        assert_eq!(PrecisionMode::parse(None, Some(5)).unwrap().mode, Precision::Auto);
        assert!(PrecisionMode::parse(Some("double"), None).is_err());
        assert!(PrecisionMode::parse(Some("float:30"), None).is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        let (code, _, err) = go(&["dims", "--triangle", "nope", "--depth", "2"]);
        assert_eq!(code, 1);
        assert_eq!(err.lines().count(), 1);
        assert_eq!(go(&["frobnicate"]).0, 1);
        assert_eq!(go(&["dims", "--triangle", "q-pascal", "--q", "1/0", "--depth", "2"]).0, 1);
        assert_eq!(go(&["--help"]).0, 0);
    }
}
