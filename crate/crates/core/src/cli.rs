//! Command-line surface. The binary only forwards process arguments to [`run`].
//!
//! Exit codes: 0 all checks pass, 1 a violation or convexity failure was
//! found, 2 invalid input, 3 numeric non-convergence.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::error::Error;
use crate::fncatalog::{check_abs_deriv_m_convex, check_m_convex, Fn1D, FnKind, FnSpec, OracleBudget};
use crate::harness::{run_sweep, SweepConfig};
use crate::hh_bounds::{full_report, identity_sides, BoundParams, IdentitySigns, ReportOptions, INEQUALITY_EPS};
use crate::means::{arithmetic_mean, gen_log_mean, log_mean, prop1_check, prop2_check, MeansCase};
use crate::quadrature::DEFAULT_TOL;
use crate::report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mconvex", version, about = "Trapezoid error bounds for m-convex functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
struct FnArgs {
    /// Inline function: power:<n>, poly:<c0,c1,...>, exp, const:<c>
    #[arg(long = "fn", conflicts_with = "fn_file")]
    function: Option<String>,
    /// JSON function spec, e.g. {"kind":"power","n":3,"domain_hi":4.0}
    #[arg(long)]
    fn_file: Option<PathBuf>,
    /// Domain upper end for inline functions (defaults to what the command needs)
    #[arg(long)]
    domain_hi: Option<f64>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 48)]
    grid_n: usize,
    #[arg(long, default_value_t = 10_000)]
    random_n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OracleArgs {
    fn budget(&self) -> OracleBudget {
        OracleBudget {
            grid_n: self.grid_n,
            random_n: self.random_n,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Deviation, all bounds, preconditions and gaps for one parameter point
    Bound {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Node in [a, b]; defaults to the midpoint
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
    },
    /// Residual of the integration-by-parts identity for the deviation
    Identity {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
    },
    /// Sampled m-convexity check of f, or of |f'|^q with --deriv
    Convexity {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        hi: f64,
        /// Check |f'|^q instead of f
        #[arg(long)]
        deriv: bool,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
    },
    /// Seeded sweep from a JSON config
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Also write per-case rows as CSV to this path
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Evaluate cases on one thread
        #[arg(long)]
        serial: bool,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
    },
    /// Special means and the two power-function propositions
    Means {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 2)]
        n: i32,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// Enables the power-mean proposition (needs q > 1)
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
    },
}

/// Failure of a whole invocation.
#[derive(Debug)]
enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Lib(Error::NoConvergence { .. }) => EXIT_NO_CONVERGENCE,
            _ => EXIT_INVALID,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Usage(s) => f.write_str(s),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Results go to `out`, diagnostics to `err`; the return value is the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.exit_code()
        }
    }
}

fn load_function(args: &FnArgs, needed_hi: f64) -> Result<Fn1D, Failure> {
    match (&args.function, &args.fn_file) {
        (Some(s), None) => {
            let kind: FnKind = s.parse()?;
            Ok(Fn1D::new(kind, args.domain_hi.unwrap_or(needed_hi))?)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let mut spec: FnSpec = serde_json::from_str(&text)
                .map_err(|e| Failure::Usage(format!("bad function spec in {}: {e}", path.display())))?;
            if let Some(hi) = args.domain_hi {
                spec.domain_hi = hi;
            }
            Ok(spec.build()?)
        }
        _ => Err(Failure::Usage("give exactly one of --fn or --fn-file".into())),
    }
}

fn emit(out: &mut dyn Write, output: Output, obj: Map<String, Value>) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Usage(format!("write failed: {e}"));
    match output {
        Output::Json => out
            .write_all(report::to_json_string(&Value::Object(obj)).as_bytes())
            .map_err(io),
        Output::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(obj.keys())
                .and_then(|_| w.write_record(obj.values().map(report::cell)))
                .and_then(|_| w.flush().map_err(Into::into))
                .map_err(|e| Failure::Usage(format!("write failed: {e}")))
        }
        Output::Text => {
            for (k, v) in &obj {
                writeln!(out, "{k:<36} {}", report::cell(v)).map_err(io)?;
            }
            Ok(())
        }
    }
}

fn status(pass: bool) -> (String, Value) {
    ("status".into(), Value::String(if pass { "pass" } else { "fail" }.into()))
}

fn exit_for(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Bound { f, a, b, x, m, q, tol, oracle, output } => {
            let params = BoundParams::new(a, b, x.unwrap_or(0.5 * (a + b)), m, q)?;
            let f = load_function(&f, (b / m).max(b))?;
            let opts = ReportOptions { tol, oracle: oracle.budget() };
            let r = full_report(&f, &params, &opts)?;
            if let Some(e) = r.errors.first() {
                let _ = writeln!(err, "error: {e}");
                let nc = r.errors.iter().any(|e| e.contains("did not converge"));
                return Ok(if nc { EXIT_NO_CONVERGENCE } else { EXIT_INVALID });
            }
            let violations = r.violations();
            for (name, bound, gap) in &violations {
                let _ = writeln!(err, "violation: |D| exceeds certified bound {name} = {bound} by {gap}");
            }
            let pass = violations.is_empty() && r.precondition_t3.holds && r.precondition_t45.holds;
            let mut obj = Map::new();
            obj.insert("function".into(), Value::String(f.label().into()));
            for (k, v) in [("a", a), ("b", b), ("x", params.x), ("m", m), ("q", q)] {
                obj.insert(k.into(), report::num(v));
            }
            obj.extend(report::hh_flat(&r));
            obj.extend([status(pass)]);
            emit(out, output, obj)?;
            Ok(exit_for(pass))
        }
        Command::Identity { f, a, b, x, tol, output } => {
            let f = load_function(&f, b)?;
            let x = x.unwrap_or(0.5 * (a + b));
            let fixed = identity_sides(&f, a, b, x, tol, IdentitySigns::Corrected)?;
            let swapped = identity_sides(&f, a, b, x, tol, IdentitySigns::Swapped)?;
            let pass = fixed.residual <= INEQUALITY_EPS;
            let mut obj = Map::new();
            obj.insert("function".into(), Value::String(f.label().into()));
            for (k, v) in [
                ("a", a),
                ("b", b),
                ("x", x),
                ("lhs", fixed.lhs),
                ("rhs", fixed.rhs),
                ("lemma1_residual", fixed.residual),
                ("rhs_swapped_signs", swapped.rhs),
                ("residual_swapped_signs", swapped.residual),
            ] {
                obj.insert(k.into(), report::num(v));
            }
            obj.extend([status(pass)]);
            emit(out, output, obj)?;
            Ok(exit_for(pass))
        }
        Command::Convexity { f, m, hi, deriv, q, oracle, output } => {
            let f = load_function(&f, hi)?;
            let r = if deriv {
                check_abs_deriv_m_convex(&f, q, m, hi, oracle.budget())?
            } else {
                check_m_convex(&f, m, hi, oracle.budget())?
            };
            if let Some(w) = r.witness {
                let _ = writeln!(
                    err,
                    "m-convexity fails at x = {}, y = {}, t = {}: lhs {} > rhs {}",
                    w.x, w.y, w.t, w.lhs, w.rhs
                );
            }
            let mut obj = Map::new();
            obj.insert("function".into(), Value::String(f.label().into()));
            obj.extend(report::convexity_flat(&r));
            obj.extend([status(r.holds)]);
            emit(out, output, obj)?;
            Ok(exit_for(r.holds))
        }
        Command::Sweep { config, csv, serial, output } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Failure::Lib(Error::Config(format!("cannot read {}: {e}", config.display()))))?;
            let mut cfg = SweepConfig::from_json(&text)?;
            if serial {
                cfg.parallel = false;
            }
            let r = run_sweep(&cfg)?;
            if let Some(path) = csv {
                let file = std::fs::File::create(&path)
                    .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", path.display())))?;
                r.write_csv(file)
                    .map_err(|e| Failure::Usage(format!("write failed: {e}")))?;
            }
            let io = |e: std::io::Error| Failure::Usage(format!("write failed: {e}"));
            match output {
                Output::Json => out.write_all(r.to_json().as_bytes()).map_err(io)?,
                Output::Csv => r.write_csv(&mut *out).map_err(io)?,
                Output::Text => {
                    writeln!(out, "status                      {}", r.status).map_err(io)?;
                    writeln!(out, "cases total                 {}", r.cases_total).map_err(io)?;
                    writeln!(out, "cases run                   {}", r.cases_run).map_err(io)?;
                    writeln!(out, "filtered (precondition)     {}", r.cases_filtered_precondition).map_err(io)?;
                    writeln!(out, "filtered (domain)           {}", r.cases_filtered_domain).map_err(io)?;
                    writeln!(out, "errored                     {}", r.cases_errored).map_err(io)?;
                    writeln!(out, "violations                  {}", r.violations.len()).map_err(io)?;
                    writeln!(out, "max identity residual       {:e}", r.max_lemma1_residual).map_err(io)?;
                    for (name, t) in &r.tightness {
                        writeln!(
                            out,
                            "tightness {name}                min {:.6} mean {:.6} max {:.6} (n = {})",
                            t.min, t.mean, t.max, t.count
                        )
                        .map_err(io)?;
                    }
                    writeln!(
                        out,
                        "t5 <= t4                    {}/{}",
                        r.ordering.t5_le_t4, r.ordering.cases_compared
                    )
                    .map_err(io)?;
                }
            }
            for v in &r.violations {
                let _ = writeln!(err, "violation: case {} bound {} exceeded by {}", v.case.index, v.bound, v.gap);
            }
            Ok(if !r.passed() {
                EXIT_FAIL
            } else if r.has_non_convergence() {
                EXIT_NO_CONVERGENCE
            } else {
                EXIT_PASS
            })
        }
        Command::Means { a, b, n, m, q, output } => {
            let case = MeansCase::new(a, b, n, m, q.unwrap_or(0.0))?;
            let p1 = prop1_check(&case)?;
            let p2 = match q {
                Some(_) => Some(prop2_check(&case)?),
                None => None,
            };
            let means = [
                ("arithmetic_mean", arithmetic_mean(a, b)?),
                ("log_mean", log_mean(a, b)?),
                ("gen_log_mean", gen_log_mean(a, b, n)?),
            ];
            let pass = p1.holds && p2.map_or(true, |p| p.holds);
            let inner = report::means_flat(&case, &means, &p1, p2.as_ref());
            match output {
                Output::Json => {
                    let mut obj = Map::new();
                    obj.extend([status(pass)]);
                    obj.insert("means".into(), Value::Object(inner));
                    emit(out, output, obj)?;
                }
                _ => {
                    let mut obj: Map<String, Value> =
                        inner.into_iter().map(|(k, v)| (format!("means.{k}"), v)).collect();
                    obj.extend([status(pass)]);
                    emit(out, output, obj)?;
                }
            }
            Ok(exit_for(pass))
        }
    }
}
