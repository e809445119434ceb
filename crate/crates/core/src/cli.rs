//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 when a hypothesis of the problem fails
//! (compatibility at z = 0, growth envelope, real coefficients), 1 on any
//! other error including malformed input and unknown flags.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;

use crate::corpus::{self, CorpusConfig, CorpusError};
use crate::fracops::{
    frac_derivative_series, frac_integral_quad, frac_integral_series, FracOpsError, JacobiRule,
    DEFAULT_NODES,
};
use crate::io::{parse_series, series_from_json_str, series_to_json, SchemaError};
use crate::realline::{check_real_compat, solve_real, RealError, DEFAULT_GRID};
use crate::series::{circle_points, FracPowerSeries, SeriesError};
use crate::solver::{
    check_problem, quadrature_residual, series_residual, solve_picard, ProblemSpec, SolveError,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Agreement required between the series operator and its quadrature oracle.
pub const ORACLE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Real(#[from] RealError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    FracOps(#[from] FracOpsError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        let violation = match self {
            CliError::Solve(e) => e.is_hypothesis_violation(),
            CliError::Real(e) => e.is_hypothesis_violation(),
            _ => false,
        };
        if violation {
            EXIT_VIOLATION
        } else {
            EXIT_INTERNAL
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fracpicard", version, about = "Fractional differential equations on the unit disc")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem and print the report.
    Solve {
        problem: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the iteration table (n, distance, ratio).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check hypotheses, Lipschitz rate and radius without solving.
    Check { problem: PathBuf },
    /// Apply a fractional operator to a series.
    Apply {
        #[arg(long, value_enum)]
        op: Operator,
        #[arg(long)]
        order: f64,
        #[arg(long)]
        series: PathBuf,
        /// Cross-check the result against Gauss–Jacobi quadrature.
        #[arg(long)]
        quad_oracle: bool,
    },
    /// Built-in catalogue of examples.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Solve a real-line problem and sample it on [0, R].
    Real {
        problem: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// Write the samples as x,u.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum CorpusAction {
    /// List entry names.
    List,
    /// Run one entry or all of them.
    Run {
        #[arg(conflicts_with = "all", required_unless_present = "all")]
        name: Option<String>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 0.5)]
        order: f64,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Operator {
    Integral,
    Derivative,
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INTERNAL } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).expect("JSON value serializes");
    writeln!(out, "{text}").map_err(|source| CliError::Write {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn load_problem(path: &Path) -> Result<ProblemSpec, CliError> {
    Ok(ProblemSpec::from_json_str(&read(path)?)?)
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Solve { problem, out: report_path, csv } => {
            let p = load_problem(&problem)?;
            let report = solve_picard(&p)?;
            let doc = json!({"problem": p.to_json_value(), "report": report.to_json()});
            match report_path {
                Some(path) => {
                    write(&path, &serde_json::to_string_pretty(&doc).expect("serializes"))?;
                    emit(out, &json!({
                        "status": report.status,
                        "iterations": report.iterations,
                        "radius": report.radius,
                        "rate": report.contraction.rate,
                        "residual_series": report.residual_series,
                        "residual_quad": report.residual_quad,
                        "report": path,
                    }))?;
                }
                None => emit(out, &doc)?,
            }
            if let Some(path) = csv {
                write(&path, &report.convergence_csv())?;
            }
            Ok(EXIT_OK)
        }
        Command::Check { problem } => check(&load_problem(&problem)?, out),
        Command::Apply {
            op,
            order,
            series,
            quad_oracle,
        } => {
            let s = series_from_json_str(&read(&series)?)?;
            apply(op, order, &s, quad_oracle, out)
        }
        Command::Corpus { action } => match action {
            CorpusAction::List => {
                emit(out, &json!(corpus::ENTRY_NAMES))?;
                Ok(EXIT_OK)
            }
            CorpusAction::Run { name, all, order, n } => {
                let cfg = CorpusConfig { order, n };
                let results = if all {
                    corpus::corpus_run_all(&cfg)?
                } else {
                    let name = name.ok_or_else(|| CliError::Usage("entry name or --all required".into()))?;
                    vec![corpus::corpus_run(&name, &cfg)?]
                };
                let passed = results.iter().filter(|r| r.passed).count();
                let green = passed == results.len();
                emit(out, &json!({
                    "order": order,
                    "n": n,
                    "passed": passed,
                    "total": results.len(),
                    "results": results,
                }))?;
                Ok(if green { EXIT_OK } else { EXIT_INTERNAL })
            }
        },
        Command::Real { problem, grid, csv } => {
            let p = load_problem(&problem)?;
            let sol = solve_real(&p, grid)?;
            if let Some(path) = &csv {
                write(path, &sol.to_csv())?;
            }
            emit(out, &json!({
                "kind": p.kind,
                "radius": sol.report.radius,
                "status": sol.report.status,
                "iterations": sol.report.iterations,
                "residual": sol.residual,
                "max_imag": sol.max_imag,
                "solution": series_to_json(&sol.report.solution),
            }))?;
            Ok(EXIT_OK)
        }
    }
}

fn check(p: &ProblemSpec, out: &mut dyn Write) -> Result<i32, CliError> {
    let real_compat = p.kind.is_real().then(|| check_real_compat(&p.rhs, p.initial));
    let mut doc = json!({
        "kind": p.kind,
        "order": p.order,
        "condition_i": {"structural": true},
    });
    if let Some(ok) = real_compat {
        doc["real_compat"] = json!(ok);
    }
    let mut passed = real_compat.unwrap_or(true);
    match check_problem(p) {
        Ok(chk) => {
            let growth_ok = chk.conditions.growth.is_none_or(|g| g.passed);
            passed &= growth_ok && chk.conditions.finite_rhs;
            doc["condition_i"]["finite_rhs"] = json!(chk.conditions.finite_rhs);
            doc["radius"] = json!(chk.radius);
            doc["radius_source"] = json!(chk.radius_source);
            doc["conditions"] = serde_json::to_value(&chk.conditions).expect("serializes");
        }
        Err(SolveError::ConditionIIViolated { gap }) => {
            passed = false;
            doc["condition_ii"] = json!({"passed": false, "gap": gap});
        }
        Err(SolveError::RegularizedCompatViolated { value }) => {
            passed = false;
            doc["regularized_compat"] = json!({"passed": false, "value": value});
        }
        Err(e) => return Err(e.into()),
    }
    doc["passed"] = json!(passed);
    emit(out, &doc)?;
    Ok(if passed { EXIT_OK } else { EXIT_VIOLATION })
}

fn apply(
    op: Operator,
    a: f64,
    s: &FracPowerSeries,
    quad_oracle: bool,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let result = match op {
        Operator::Integral => frac_integral_series(s, a)?,
        Operator::Derivative => frac_derivative_series(s, a)?,
    };
    let mut doc = json!({"series": series_to_json(&result)});
    let mut ok = true;
    if quad_oracle {
        let diff = match op {
            // I^a s against the rule absorbing z^μ.
            Operator::Integral => oracle_gap(s, &result, a)?,
            // I^a(D^a s) against s with its kernel term removed.
            Operator::Derivative => {
                let mut target = s.clone();
                let k = a - 1.0 - s.mu;
                if k > -0.5 && (k - k.round()).abs() < 1e-12 {
                    if let Some(c) = target.coeffs.get_mut(k.round() as usize) {
                        *c = Complex64::new(0.0, 0.0);
                    }
                }
                oracle_gap(&result, &target, a)?
            }
        };
        ok = diff <= ORACLE_TOL;
        doc["quad_oracle"] = json!({"nodes": DEFAULT_NODES, "max_rel_diff": diff, "agree": ok});
    }
    emit(out, &doc)?;
    Ok(if ok { EXIT_OK } else { EXIT_INTERNAL })
}

/// max |quad I^a[input](z) − expected(z)| / (1 + |expected(z)|) over 20
/// points on circles of radius 0.25, 0.5, 0.75 and 1.
fn oracle_gap(input: &FracPowerSeries, expected: &FracPowerSeries, a: f64) -> Result<f64, CliError> {
    let rule = JacobiRule::with_origin_exponent(DEFAULT_NODES, a, input.mu)?;
    let analytic = FracPowerSeries::analytic(input.coeffs.clone());
    let mut worst: f64 = 0.0;
    for r in [0.25, 0.5, 0.75, 1.0] {
        for z in circle_points(r, 5) {
            let q = frac_integral_quad(|w| -> Result<Complex64, CliError> { Ok(analytic.eval(w)?) }, a, z, &rule)?;
            let v = expected.eval(z)?;
            worst = worst.max((q - v).norm() / (1.0 + v.norm()));
        }
    }
    Ok(worst)
}

/// Re-evaluates the residuals of a report written by `solve --out`.
///
/// Returns (series residual, quadrature residual).
pub fn reevaluate_report(doc: &Value) -> Result<(f64, f64), CliError> {
    let p = ProblemSpec::from_json_value(&doc["problem"])?;
    let report = &doc["report"];
    let u = parse_series(&report["solution"], "report.solution")?;
    let radius = report["radius"]
        .as_f64()
        .ok_or_else(|| CliError::Usage("report.radius missing".into()))?;
    let kind = p.kind.complex_counterpart();
    let series = series_residual(&p.rhs, &u, p.order, kind, p.initial, p.trunc, radius)?;
    let quad = quadrature_residual(&p.rhs, &u, p.order, kind, p.initial, radius)?;
    Ok((series, quad))
}
