//! Argument definitions and subcommand handlers.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use log::warn;
use sparseconv::rng::{stream_rng, Stream};
use sparseconv::{
    equality_test, multiply_polynomials, AlgoParams, Backend, Error, SparseVector, Verdict,
};

use crate::bench::{run_bench, BenchConfig};
use crate::instance::{gen_instance, InstanceSpec};
use crate::io::{format_poly, read_poly_file, write_poly_file, PolyFileError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sparseconv", version, about = "Sparse polynomial multiplication")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multiply two polynomial files.
    Multiply(MultiplyArgs),
    /// Generate a seeded operand pair.
    Gen(GenArgs),
    /// Check that a product file equals A·B (randomized, one-sided).
    Verify(VerifyArgs),
    /// Time the backends on generated instances; prints one JSON object per run.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct MultiplyArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Product file; without it the product goes to stdout.
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "sparse")]
    pub algo: Backend,
    #[arg(long, env = "SPARSECONV_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Retry with the dense backend when the sparse one gives up.
    #[arg(long)]
    pub fallback_dense: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub terms: u64,
    #[arg(long, default_value_t = 100)]
    pub coeff_bound: i64,
    #[arg(long, default_value_t = 0.0)]
    pub cancel_fraction: f64,
    #[arg(long, env = "SPARSECONV_SEED", default_value_t = 0)]
    pub seed: u64,
    /// First operand file.
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
    /// Second operand file (also spelled `-o2`).
    #[arg(long = "out2")]
    pub out2: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    pub product: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    pub delta: f64,
    #[arg(long, env = "SPARSECONV_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub terms: u64,
    #[arg(long, default_value_t = 100)]
    pub coeff_bound: i64,
    #[arg(long, default_value_t = 0.0)]
    pub cancel_fraction: f64,
    #[arg(long, value_delimiter = ',', default_value = "naive,dense,sparse")]
    pub algos: Vec<Backend>,
    #[arg(long, default_value_t = 1)]
    pub repeats: u32,
    #[arg(long, env = "SPARSECONV_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the records here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Failed(_) => EXIT_FAILURE,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::RoundsExhausted { .. }
            | Error::PrimeSearchExhausted { .. }
            | Error::Precision { .. }
            | Error::Overflow(_) => CliError::Failed(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<PolyFileError> for CliError {
    fn from(e: PolyFileError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Invalid(format!("{}: {e}", path.display()))
}

/// Rewrites the `-o2` spelling, which is not a valid clap short flag.
pub fn normalize_args<I, T>(args: I) -> Vec<OsString>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    args.into_iter()
        .map(|a| {
            let a: OsString = a.into();
            match a.to_str() {
                Some("-o2") => OsString::from("--out2"),
                Some(s) if s.starts_with("-o2=") => OsString::from(format!("--out2={}", &s[4..])),
                _ => a,
            }
        })
        .collect()
}

fn read_operands(a: &PathBuf, b: &PathBuf) -> Result<(SparseVector, SparseVector), CliError> {
    let u = read_poly_file(a)?;
    let v = read_poly_file(b)?;
    if u.dim() != v.dim() {
        return Err(CliError::Invalid(format!(
            "operand lengths differ: {} has N = {}, {} has N = {}",
            a.display(),
            u.dim(),
            b.display(),
            v.dim()
        )));
    }
    Ok((u, v))
}

pub fn run_multiply(
    args: &MultiplyArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let (u, v) = read_operands(&args.a, &args.b)?;
    let params = AlgoParams::default();
    let product = match multiply_polynomials(&u, &v, args.algo, args.seed, &params) {
        Err(e @ Error::RoundsExhausted { .. }) if args.fallback_dense => {
            warn!("{e}; falling back to the dense backend");
            multiply_polynomials(&u, &v, Backend::Dense, args.seed, &params)?
        }
        other => other?,
    };
    let k_out = format!("k_out {}", product.l0());
    match &args.out {
        Some(path) => {
            write_poly_file(&product, path)?;
            writeln!(out, "{k_out}").map_err(|e| io_error(path, e))?;
        }
        None => {
            out.write_all(format_poly(&product).as_bytes())
                .and_then(|_| writeln!(err, "{k_out}"))
                .map_err(|e| io_error(&PathBuf::from("<stdout>"), e))?;
        }
    }
    Ok(())
}

pub fn run_gen(args: &GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (u, v) = gen_instance(&InstanceSpec {
        n: args.n,
        terms: args.terms,
        coeff_bound: args.coeff_bound,
        cancel_fraction: args.cancel_fraction,
        seed: args.seed,
    })?;
    write_poly_file(&u, &args.out)?;
    write_poly_file(&v, &args.out2)?;
    writeln!(
        out,
        "wrote {} ({} terms) and {} ({} terms)",
        args.out.display(),
        u.l0(),
        args.out2.display(),
        v.l0()
    )
    .map_err(|e| io_error(&args.out, e))
}

pub fn run_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !(args.delta > 0.0 && args.delta < 1.0) {
        return Err(CliError::Invalid(format!("delta {} not in (0, 1)", args.delta)));
    }
    let (u, v) = read_operands(&args.a, &args.b)?;
    let w = read_poly_file(&args.product)?;
    let n = 2 * u.dim();
    if w.dim() != n {
        return Err(CliError::Invalid(format!(
            "product has N = {}, expected {n} for operands of length {}",
            w.dim(),
            u.dim()
        )));
    }
    let (x, y) = (u.zero_pad(n)?, v.zero_pad(n)?);
    let mut rng = stream_rng(args.seed, Stream::Fingerprint);
    let verdict = equality_test(&x, &y, &w, args.delta, &mut rng)?;
    let stdout = PathBuf::from("<stdout>");
    match verdict {
        Verdict::Yes => writeln!(out, "yes").map_err(|e| io_error(&stdout, e)),
        Verdict::No => {
            writeln!(out, "no").map_err(|e| io_error(&stdout, e))?;
            Err(CliError::Failed(format!(
                "{} is not the product",
                args.product.display()
            )))
        }
    }
}

pub fn run_bench_command(args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let records = run_bench(&BenchConfig {
        n: args.n,
        terms: args.terms,
        coeff_bound: args.coeff_bound,
        cancel_fraction: args.cancel_fraction,
        algos: args.algos.clone(),
        repeats: args.repeats,
        seed: args.seed,
    })?;
    let text: String = records.iter().map(|r| r.to_json_line() + "\n").collect();
    match &args.json {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| io_error(&PathBuf::from("<stdout>"), e)),
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Multiply(a) => run_multiply(a, out, err),
        Command::Gen(a) => run_gen(a, out),
        Command::Verify(a) => run_verify(a, out),
        Command::Bench(a) => run_bench_command(a, out),
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let cli = match Cli::try_parse_from(normalize_args(args)) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
