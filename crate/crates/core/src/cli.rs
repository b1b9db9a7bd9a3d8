//! Command-line front end.
//!
//! Exit codes: 0 success, 1 malformed input, 2 identity failure or
//! non-expandable tensor, 3 convergence-domain violation.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::Error;
use crate::expansion::{
    hermite_expand, pde_check, AnyTensor, CoeffTensor, HermiteExpansion, TensorCoeff,
};
use crate::hermite::{hermite_eval, hermite_poly, HermiteIndex};
use crate::identities::sweep::{self, SweepOptions};
use crate::identities::VerificationReport;
use crate::kernels::{
    compare_kernel, complex_from_json, parse_complex, KernelComparison, KernelKind,
    TruncationPolicy,
};
use crate::poly::ComplexValue;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Environment variable capping `--max-order` for every kernel run.
pub const MAX_ORDER_ENV: &str = "HERMITE_MAX_ORDER";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Parser)]
#[command(
    name = "chermite",
    version,
    about = "Complex Hermite polynomials H_{m,n}(x, y, z)"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: OutputFormat,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate H_{m,n}(x, y, z) at a complex point.
    Eval(EvalArgs),
    /// Print the exact coefficients of H_{m,n}.
    Coeffs(IndexArgs),
    /// Run an identity sweep and stream one report per case.
    Verify(VerifyArgs),
    /// Compare a kernel's closed form with its truncated series.
    Kernel(KernelArgs),
    /// Expand a coefficient tensor in complex Hermite polynomials.
    Expand(ExpandArgs),
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub n: u32,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub n: u32,
    /// Complex value: "a+bi", a real number or {"re":…,"im":…}.
    #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
    pub x: ComplexValue,
    #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
    pub y: ComplexValue,
    #[arg(long, allow_hyphen_values = true, value_parser = complex_arg)]
    pub z: ComplexValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Identity {
    Pde,
    NielsenLin,
    NielsenProd,
    Duality,
    Addition,
    Fourvar,
    Inversion,
    Operator,
    Scaling,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub identity: Identity,
    /// Index bound; its meaning depends on the identity.
    #[arg(long)]
    pub max_degree: Option<u32>,
    /// Number of argument blocks for the addition formula.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random vectors per block count (addition) or points (scaling).
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelName {
    Genfn,
    Mehler,
    Multilinear,
    Mixed,
    MixedShifted,
    ClassicalMehler,
    Weisner,
}

impl From<KernelName> for KernelKind {
    fn from(k: KernelName) -> Self {
        match k {
            KernelName::Genfn => KernelKind::Genfn,
            KernelName::Mehler => KernelKind::Mehler,
            KernelName::Multilinear => KernelKind::Multilinear,
            KernelName::Mixed => KernelKind::Mixed,
            KernelName::MixedShifted => KernelKind::MixedShifted,
            KernelName::ClassicalMehler => KernelKind::ClassicalMehler,
            KernelName::Weisner => KernelKind::Weisner,
        }
    }
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(value_enum)]
    pub kernel: KernelName,
    /// JSON file with the kernel's parameters.
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long, default_value_t = crate::kernels::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = crate::kernels::DEFAULT_MAX_ORDER)]
    pub max_order: usize,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    /// Coefficient tensor JSON file.
    #[arg(long)]
    pub input: PathBuf,
}

fn complex_arg(s: &str) -> Result<ComplexValue, String> {
    if s.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(s).map_err(|e| e.to_string())?;
        complex_from_json(&v).map_err(|e| e.to_string())
    } else {
        parse_complex(s).map_err(|e| e.to_string())
    }
}

/// A failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::OutsideConvergenceDomain { .. } => EXIT_DOMAIN,
            Error::NotHermiteExpandable { .. } | Error::EvalOverflow => EXIT_FAILURE,
            Error::Arity { .. }
            | Error::NonFinite(_)
            | Error::SingularScaling
            | Error::Parse(_)
            | Error::InvalidArgument(_) => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

type CliResult = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command. Output
/// goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult {
    let fmt = cli.format;
    match &cli.command {
        Command::Eval(a) => cmd_eval(a, fmt, out),
        Command::Coeffs(a) => cmd_coeffs(a, fmt, out),
        Command::Verify(a) => cmd_verify(a, fmt, out),
        Command::Kernel(a) => cmd_kernel(a, fmt, out),
        Command::Expand(a) => cmd_expand(a, fmt, out),
    }
}

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new().from_writer(out)
}

fn csv_error(e: csv::Error) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: e.to_string(),
    }
}

fn write_json(out: &mut dyn Write, fmt: OutputFormat, v: &Value) -> std::io::Result<()> {
    match fmt {
        OutputFormat::Pretty => writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json")),
        _ => writeln!(out, "{v}"),
    }
}

fn cmd_eval(a: &EvalArgs, fmt: OutputFormat, out: &mut dyn Write) -> CliResult {
    let v = hermite_eval(HermiteIndex::new(a.m, a.n), a.x, a.y, a.z)?;
    match fmt {
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["m", "n", "re", "im"]).map_err(csv_error)?;
            w.write_record([
                a.m.to_string(),
                a.n.to_string(),
                v.re.to_string(),
                v.im.to_string(),
            ])
            .map_err(csv_error)?;
            w.flush()?;
        }
        OutputFormat::Pretty => writeln!(out, "H_{{{},{}}} = {}", a.m, a.n, v)?,
        OutputFormat::Json => write_json(out, fmt, &json!({"value": {"re": v.re, "im": v.im}}))?,
    }
    Ok(EXIT_OK)
}

fn cmd_coeffs(a: &IndexArgs, fmt: OutputFormat, out: &mut dyn Write) -> CliResult {
    let p = hermite_poly(HermiteIndex::new(a.m, a.n));
    match fmt {
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["x", "y", "z", "coeff"])
                .map_err(csv_error)?;
            for (e, c) in p.terms() {
                w.write_record([
                    e[0].to_string(),
                    e[1].to_string(),
                    e[2].to_string(),
                    c.to_string(),
                ])
                .map_err(csv_error)?;
            }
            w.flush()?;
        }
        OutputFormat::Pretty => writeln!(out, "H_{{{},{}}} = {}", a.m, a.n, p)?,
        OutputFormat::Json => write_json(out, fmt, &p.to_json())?,
    }
    Ok(EXIT_OK)
}

fn run_sweep(a: &VerifyArgs) -> std::result::Result<Vec<VerificationReport>, Failure> {
    let name = a.identity.to_possible_value().expect("no skipped variants");
    let opts = SweepOptions {
        max_degree: a.max_degree,
        k: a.k,
        samples: a.samples,
        seed: a.seed,
    };
    Ok(sweep::by_name(name.get_name(), &opts)?)
}

fn cmd_verify(a: &VerifyArgs, fmt: OutputFormat, out: &mut dyn Write) -> CliResult {
    let reports = run_sweep(a)?;
    match fmt {
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["identity", "status", "params", "witness"])
                .map_err(csv_error)?;
            for r in &reports {
                let j = r.to_json();
                let witness = if r.witness.is_some() {
                    j["witness"].to_string()
                } else {
                    String::new()
                };
                w.write_record([
                    r.identity.clone(),
                    j["status"].as_str().unwrap_or_default().to_string(),
                    j["params"].to_string(),
                    witness,
                ])
                .map_err(csv_error)?;
            }
            w.flush()?;
        }
        OutputFormat::Pretty => {
            for r in &reports {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                writeln!(
                    out,
                    "{status} {} {}",
                    r.identity,
                    Value::Object(r.params.clone())
                )?;
                if let Some(w) = &r.witness {
                    writeln!(
                        out,
                        "  witness: {}",
                        serde_json::to_string(w).expect("json")
                    )?;
                }
            }
        }
        OutputFormat::Json => {
            for r in &reports {
                writeln!(out, "{}", r.to_json())?;
            }
        }
    }
    Ok(if reports.iter().all(VerificationReport::passed) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

fn read_json(path: &Path) -> std::result::Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn max_order_cap() -> std::result::Result<Option<usize>, Failure> {
    match std::env::var(MAX_ORDER_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            input_error(format!(
                "{MAX_ORDER_ENV}={v:?} is not a non-negative integer"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(input_error(format!("{MAX_ORDER_ENV}: {e}"))),
    }
}

fn cmd_kernel(a: &KernelArgs, fmt: OutputFormat, out: &mut dyn Write) -> CliResult {
    let max_order = match max_order_cap()? {
        Some(cap) => a.max_order.min(cap),
        None => a.max_order,
    };
    let policy = TruncationPolicy::new(a.tol, max_order)?;
    let params = read_json(&a.params)?;
    let cmp = compare_kernel(a.kernel.into(), &params, policy)?;
    write_comparison(&cmp, fmt, out)?;
    Ok(if cmp.ok() { EXIT_OK } else { EXIT_FAILURE })
}

fn write_comparison(
    cmp: &KernelComparison,
    fmt: OutputFormat,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    match fmt {
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record([
                "kernel",
                "closed_re",
                "closed_im",
                "series_re",
                "series_im",
                "order_used",
                "tail_estimate",
                "converged",
                "abs_error",
                "within_tol",
            ])
            .map_err(csv_error)?;
            w.write_record([
                cmp.kernel.clone(),
                cmp.closed.re.to_string(),
                cmp.closed.im.to_string(),
                cmp.series.value.re.to_string(),
                cmp.series.value.im.to_string(),
                cmp.series.order_used.to_string(),
                cmp.series.tail_estimate.to_string(),
                cmp.series.converged.to_string(),
                cmp.abs_error.to_string(),
                cmp.within_tol.to_string(),
            ])
            .map_err(csv_error)?;
            w.flush()?;
        }
        _ => write_json(out, fmt, &serde_json::to_value(cmp).expect("json"))?,
    }
    Ok(())
}

fn write_expansion<T: TensorCoeff>(
    e: &HermiteExpansion<T>,
    fmt: OutputFormat,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    match fmt {
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["m", "n", "coeff"]).map_err(csv_error)?;
            for (idx, c) in &e.coeffs {
                let text = match c.to_json() {
                    Value::String(s) => s,
                    other => other.to_string(),
                };
                w.write_record([idx.m.to_string(), idx.n.to_string(), text])
                    .map_err(csv_error)?;
            }
            w.flush()?;
        }
        _ => write_json(out, fmt, &e.to_json())?,
    }
    Ok(())
}

fn expand_typed<T: TensorCoeff>(
    t: &CoeffTensor<T>,
    fmt: OutputFormat,
    out: &mut dyn Write,
) -> CliResult {
    let report = pde_check(t);
    if !report.passed() {
        let err = hermite_expand(t).expect_err("pde_check failed");
        return Err(Failure {
            code: EXIT_FAILURE,
            message: format!("{err}; report: {}", report.to_json()),
        });
    }
    write_expansion(&hermite_expand(t)?, fmt, out)?;
    Ok(EXIT_OK)
}

fn cmd_expand(a: &ExpandArgs, fmt: OutputFormat, out: &mut dyn Write) -> CliResult {
    match AnyTensor::from_json(&read_json(&a.input)?)? {
        AnyTensor::Exact(t) => expand_typed::<BigRational>(&t, fmt, out),
        AnyTensor::Float(t) => expand_typed::<ComplexValue>(&t, fmt, out),
    }
}
