use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bandlimited_up::limits::{default_deltas, delta_sweep, format_float};
use bandlimited_up::optimizer::{minimize_ratio, OptimizeConfig, SUSPECT};
use bandlimited_up::oracle::{closed_form, validate_kernels_with, KernelKind, KernelValidation};
use bandlimited_up::{CoeffVec, DiffMode, InequalityKind, InequalityReport, ToleranceConfig, UpError, Verifier};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

mod input;

use input::InputArgs;

#[derive(Debug, Parser)]
#[command(
    name = "upcheck",
    version,
    about = "Uncertainty inequalities for band-limited functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run inequality checks on one or more functions.
    Verify(VerifyArgs),
    /// Tabulate the difference-operator inequality over a list of steps.
    Sweep(SweepArgs),
    /// Search for functions that make the inequality tight.
    Optimize(OptimizeArgs),
    /// Compare every closed-form kernel against quadrature.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Backward,
    Central,
}

impl From<Mode> for DiffMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Backward => DiffMode::Backward,
            Mode::Central => DiffMode::Central,
        }
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TolArgs {
    #[arg(long, default_value_t = 1e-10)]
    tol_eq: f64,

    #[arg(long, default_value_t = 1e-6)]
    tol_oracle: f64,

    #[arg(long, default_value_t = 1e-10)]
    ineq_slack: f64,
}

impl TolArgs {
    fn config(&self) -> Result<ToleranceConfig> {
        let cfg = ToleranceConfig {
            eq_tol: self.tol_eq,
            oracle_tol: self.tol_oracle,
            ineq_slack: self.ineq_slack,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Step of the difference operators.
    #[arg(long, default_value_t = 0.5)]
    delta: f64,

    /// Comma-separated subset of checks (default: all).
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,

    #[command(flatten)]
    tol: TolArgs,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,

    /// Comma-separated steps (default: 2^-k for k = 0..10).
    #[arg(long, value_delimiter = ',')]
    deltas: Vec<f64>,

    #[arg(long, value_enum, default_value_t = Mode::Backward)]
    mode: Mode,

    #[command(flatten)]
    tol: TolArgs,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    /// Odd support size.
    #[arg(long, default_value_t = 11)]
    dim: usize,

    #[arg(long, default_value_t = 1.0)]
    delta: f64,

    #[arg(long, value_enum, default_value_t = Mode::Backward)]
    mode: Mode,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, default_value_t = 8)]
    restarts: usize,

    #[arg(long, default_value_t = 2000)]
    max_iters: usize,

    #[arg(long, default_value_t = 0.1)]
    step0: f64,

    #[command(flatten)]
    tol: TolArgs,

    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 32)]
    max_lag: i64,

    /// Comma-separated shift parameters.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5, 0.75, 1.0])]
    deltas: Vec<f64>,

    /// Perturb one tabulated kernel value before validation.
    #[arg(long, hide = true)]
    inject_kernel_fault: bool,

    #[command(flatten)]
    output: OutputArgs,
}

/// Verdict of a run whose input was well formed.
enum Verdict {
    Pass,
    Fail,
}

fn emit(output: &OutputArgs, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct VerifyEntry {
    input: usize,
    #[serde(flatten)]
    body: VerifyBody,
}

#[derive(Serialize)]
#[serde(untagged)]
enum VerifyBody {
    Report(InequalityReport),
    Error {
        name: InequalityKind,
        error: &'static str,
        message: String,
    },
}

fn parse_checks(names: &[String]) -> Result<Vec<InequalityKind>> {
    if names.is_empty() {
        return Ok(InequalityKind::ALL.to_vec());
    }
    names
        .iter()
        .map(|n| n.trim().parse::<InequalityKind>().map_err(anyhow::Error::from))
        .collect()
}

fn run_verify(args: &VerifyArgs) -> Result<Verdict> {
    let verifier = Verifier::new(args.tol.config()?)?;
    let checks = parse_checks(&args.checks)?;
    let functions = args.input.load()?;
    let jobs: Vec<(usize, InequalityKind)> = (0..functions.len())
        .flat_map(|i| checks.iter().map(move |&k| (i, k)))
        .collect();
    use rayon::prelude::*;
    let entries: Vec<VerifyEntry> = jobs
        .par_iter()
        .map(|&(input, kind)| {
            let body = match verifier.run_default(kind, &functions[input], args.delta) {
                Ok(r) => VerifyBody::Report(r),
                Err(e) => VerifyBody::Error {
                    name: kind,
                    error: e.kind(),
                    message: e.to_string(),
                },
            };
            VerifyEntry { input, body }
        })
        .collect();

    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&entries)?,
        Format::Csv => verify_csv(&entries),
    };
    emit(&args.output, &text)?;

    let mut input_errors = Vec::new();
    let mut failed = false;
    for e in &entries {
        match &e.body {
            VerifyBody::Report(r) => failed |= !r.pass,
            VerifyBody::Error { name, message, .. } => {
                input_errors.push(format!("input {} {}: {message}", e.input, name.as_str()))
            }
        }
    }
    if !input_errors.is_empty() {
        bail!(input_errors.join("\n"));
    }
    Ok(if failed { Verdict::Fail } else { Verdict::Pass })
}

fn verify_csv(entries: &[VerifyEntry]) -> String {
    let mut out = String::from("input,name,lhs,rhs,residual,pass,degenerate_bound,error\n");
    for e in entries {
        let line = match &e.body {
            VerifyBody::Report(r) => format!(
                "{},{},{},{},{},{},{},",
                e.input,
                r.name.as_str(),
                format_float(r.lhs),
                format_float(r.rhs),
                format_float(r.residual),
                r.pass,
                r.degenerate_bound
            ),
            VerifyBody::Error { name, error, .. } => format!("{},{},,,,,,{error}", e.input, name.as_str()),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn single_input(input: &InputArgs) -> Result<CoeffVec> {
    let mut functions = input.load()?;
    if functions.len() != 1 {
        bail!("expected exactly one function, got {}", functions.len());
    }
    Ok(functions.remove(0))
}

fn run_sweep(args: &SweepArgs) -> Result<Verdict> {
    let verifier = Verifier::new(args.tol.config()?)?;
    let f = single_input(&args.input)?;
    let deltas = if args.deltas.is_empty() {
        default_deltas()
    } else {
        args.deltas.clone()
    };
    let table = delta_sweep(&verifier, &f, &deltas, args.mode.into())?;
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => table.to_csv(),
        Format::Json => to_json(&table)?,
    };
    emit(&args.output, &text)?;
    Ok(if table.min_residual() >= -args.tol.ineq_slack {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}

fn run_optimize(args: &OptimizeArgs) -> Result<Verdict> {
    let tol = args.tol.config()?;
    let cfg = OptimizeConfig {
        dim: args.dim,
        delta: args.delta,
        mode: args.mode.into(),
        max_iters: args.max_iters,
        step0: args.step0,
        seed: args.seed,
        restarts: args.restarts,
    };
    cfg.validate()?;
    let res = match minimize_ratio(&cfg) {
        Ok(r) => r,
        Err(e @ (UpError::BoundViolation { .. } | UpError::AllStartsDegenerate)) => {
            eprintln!("optimize: {e}");
            return Ok(Verdict::Fail);
        }
        Err(e) => return Err(e.into()),
    };
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&res)?,
        Format::Csv => {
            let mut s = String::from("iter,ratio\n");
            for (i, r) in &res.trace {
                s.push_str(&format!("{i},{}\n", format_float(*r)));
            }
            s
        }
    };
    emit(&args.output, &text)?;
    let agrees = (res.oracle_ratio - res.ratio).abs() <= tol.oracle_tol * res.ratio.abs();
    if !agrees {
        eprintln!(
            "optimize: oracle ratio {} disagrees with {}",
            res.oracle_ratio, res.ratio
        );
    }
    Ok(if res.ratio >= 1.0 - SUSPECT && agrees {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}

fn run_oracle_check(args: &OracleArgs) -> Result<Verdict> {
    let fault = args.inject_kernel_fault;
    let report: KernelValidation = validate_kernels_with(args.max_lag, &args.deltas, |kind, k, d| {
        let v = closed_form(kind, k, d);
        if fault && kind == KernelKind::Moment2 && k == 0 {
            v + Complex64::new(1e-8, 0.0)
        } else {
            v
        }
    })?;
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report.checks)?,
        Format::Csv => {
            let mut s = String::from("kind,k,delta,closed_re,closed_im,quad_re,quad_im,abs_err\n");
            for c in &report.checks {
                let kind = serde_json::to_value(c.kind)?;
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    kind.as_str().unwrap_or_default(),
                    c.k,
                    c.delta.map(format_float).unwrap_or_default(),
                    format_float(c.closed_form.re),
                    format_float(c.closed_form.im),
                    format_float(c.quadrature.re),
                    format_float(c.quadrature.im),
                    format_float(c.abs_err)
                ));
            }
            s
        }
    };
    emit(&args.output, &text)?;
    for c in report.failures() {
        eprintln!(
            "kernel mismatch: {:?} k={} delta={:?} err={:e}",
            c.kind, c.k, c.delta, c.abs_err
        );
    }
    eprintln!(
        "{} kernel entries, max abs err {:e}, tol {:e}",
        report.checks.len(),
        report.max_abs_err(),
        report.tol
    );
    Ok(if report.pass() { Verdict::Pass } else { Verdict::Fail })
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("UP_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("UP_THREADS={v:?} is not a count"))?;
        if n == 0 {
            bail!("UP_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Verify(a) => run_verify(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Optimize(a) => run_optimize(a),
        Command::OracleCheck(a) => run_oracle_check(a),
    });
    match result {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
