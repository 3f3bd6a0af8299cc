//! `gabor-glp`: batch jobs for constructing windows, certifying general
//! linear position, analyzing determinant monomials and simulating erasures.
//!
//! Exit status: 0 when every check passed, 1 when a dependency or violation
//! was found, 2 for usage and configuration errors.

mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gabor_glp::erasure::{run_trial, TrialVerdict};
use gabor_glp::glp::{
    binomial, checker_for, fourier_minor_check, verify_glp, write_witness_csv, Backend, GlpVerdict,
    SupportEnumeration, DEFAULT_PRIME_COUNT,
};
use gabor_glp::monomial::DEFAULT_CLASS_BUDGET;
use gabor_glp::scalar::{DEFAULT_EPS, DEFAULT_PRIME_BITS};
use gabor_glp::window::{construct, AnyWindow, WindowRecord, WindowSpec};
use gabor_glp::{parse_support, Error};
use num_complex::Complex64;
use rayon::prelude::*;

use report::{analyze_support, construction_for, Report, SimulationResult, SimulationSummary};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "gabor-glp", version, about = "Gabor frames in general linear position")]
struct Cli {
    /// Worker threads (default: all cores). Does not affect any output.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a window and print it with its construction parameters.
    Construct(ConstructArgs),
    /// Check that every N-subset of the Gabor system is independent.
    Verify(VerifyArgs),
    /// Profile, CI monomial and coefficient, moments and Q for one support.
    Analyze(AnalyzeArgs),
    /// Erase coefficients at random and reconstruct.
    Simulate(SimulateArgs),
    /// Check every square minor of the p x p DFT matrix.
    FourierCheck(FourierArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum WindowKind {
    RootOfUnity,
    Power,
    Random,
    Ones,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug, Clone)]
struct WindowArgs {
    /// Dimension N.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = WindowKind::RootOfUnity)]
    window: WindowKind,
    /// Base `re,im` of the power window `xi^{j^2}`.
    #[arg(long, default_value = "3.141592653589793,0")]
    xi: String,
    /// Seed for random windows, sampling and the small-N fallback.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Read the window from a JSON file written by `construct`.
    #[arg(long)]
    window_file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Write the JSON report here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct PrimeArgs {
    /// Embedding primes are the smallest ones above 2^bits.
    #[arg(long, default_value_t = DEFAULT_PRIME_BITS)]
    prime_bits: u32,
    /// Primes that must all vanish before a determinant counts as zero.
    #[arg(long, default_value_t = DEFAULT_PRIME_COUNT)]
    primes: usize,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    prime: PrimeArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,
    /// Number of supports in sampled mode.
    #[arg(long)]
    count: Option<usize>,
    /// Relative zero tolerance of the float backend.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    /// Largest exhaustive enumeration allowed.
    #[arg(long, default_value_t = 1_000_000_000)]
    budget: u128,
    /// Dependent supports listed in the report (all are counted).
    #[arg(long, default_value_t = 64)]
    max_witnesses: usize,
    /// Also write the listed dependent supports as CSV.
    #[arg(long)]
    witnesses: Option<PathBuf>,
    #[command(flatten)]
    prime: PrimeArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long)]
    n: usize,
    /// Support as `(k,l);(k,l);...`.
    #[arg(long)]
    support: String,
    /// Include the full determinant expansion (N <= 6).
    #[arg(long)]
    expand: bool,
    #[arg(long, default_value_t = DEFAULT_PRIME_BITS)]
    prime_bits: u32,
    /// Largest number of partition classes enumerated for the moment table.
    #[arg(long, default_value_t = DEFAULT_CLASS_BUDGET)]
    budget: u128,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long, default_value_t = 500)]
    trials: u64,
    /// Surviving coefficients per trial (default N).
    #[arg(long)]
    kept: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct FourierArgs {
    /// Prime dimension p.
    #[arg(long)]
    p: u64,
    #[command(flatten)]
    prime: PrimeArgs,
    #[command(flatten)]
    out: OutputArgs,
}

enum Failure {
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = Result<bool, Failure>;

fn parse_xi(s: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|_| Failure::Usage(format!("cannot parse xi component {x:?}")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Failure::Usage(format!("xi must be `re` or `re,im`, got {s:?}"))),
    }
}

fn load_window(args: &WindowArgs) -> Result<AnyWindow, Failure> {
    if let Some(path) = &args.window_file {
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let record = value.get("window").cloned().unwrap_or(value);
        let record: WindowRecord =
            serde_json::from_value(record).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let w = record.to_window()?;
        if w.dim() != args.n {
            return Err(Failure::Usage(format!("window file has N={}, but --n {}", w.dim(), args.n)));
        }
        return Ok(w);
    }
    let spec = match args.window {
        WindowKind::RootOfUnity => WindowSpec::RootOfUnity,
        WindowKind::Power => WindowSpec::GenericPower(parse_xi(&args.xi)?),
        WindowKind::Random => WindowSpec::Random { seed: args.seed },
        WindowKind::Ones => WindowSpec::Ones,
    };
    Ok(construct(args.n, spec, args.seed)?)
}

fn window_config(args: &WindowArgs) -> serde_json::Value {
    match &args.window_file {
        Some(path) => json!({ "file": path.display().to_string() }),
        None => json!({
            "kind": args.window.to_possible_value().map(|v| v.get_name().to_string()),
            "xi": args.xi,
            "seed": args.seed,
        }),
    }
}

fn emit<T: serde::Serialize>(report: &T, out: &OutputArgs) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn cmd_construct(args: &ConstructArgs) -> CliResult {
    let start = Instant::now();
    let w = load_window(&args.window)?;
    let construction = construction_for(&w, args.prime.prime_bits, args.prime.primes)?;
    // windows outside the root-of-unity construction get a float certification pass
    let certification = if matches!(w, AnyWindow::Float(_)) && binomial((w.dim() * w.dim()) as u64, w.dim() as u64) <= 100_000 {
        eprintln!("certifying N={} float window exhaustively", w.dim());
        let checker = checker_for(&w, &Backend::float())?;
        Some(verify_glp(checker.as_ref(), w.provenance(), &SupportEnumeration::exhaustive(w.dim()))?)
    } else {
        None
    };
    let ok = certification.as_ref().map_or(true, |r| r.verdict == GlpVerdict::GlpCertified);
    let config = json!({
        "window": window_config(&args.window),
        "prime_bits": args.prime.prime_bits,
        "primes": args.prime.primes,
    });
    let report =
        Report::new("construct", w.dim(), config, construction, Some(WindowRecord::from_window(&w)?), certification, start);
    emit(&report, &args.out)?;
    Ok(ok)
}

fn cmd_verify(args: &VerifyArgs) -> CliResult {
    let start = Instant::now();
    let n = args.window.n;
    let w = load_window(&args.window)?;
    let backend = match args.backend {
        BackendArg::Exact => Backend::Exact { prime_bits: args.prime.prime_bits, primes: args.prime.primes },
        BackendArg::Float => Backend::Float { eps: args.eps },
    };
    let enumeration = match args.mode {
        ModeArg::Exhaustive => {
            let needed = binomial((n * n) as u64, n as u64);
            if needed > args.budget {
                return Err(Error::BudgetExceeded { needed, budget: args.budget }.into());
            }
            SupportEnumeration::exhaustive(n)
        }
        ModeArg::Sampled => {
            let count = args.count.ok_or_else(|| Failure::Usage("sampled mode needs --count".into()))?;
            SupportEnumeration::sampled(n, count, args.window.seed)?
        }
    };
    let checker = checker_for(&w, &backend)?;
    eprintln!("verifying {} supports of N={n} ({} backend)", enumeration.len(), checker.backend());
    let r = gabor_glp::glp::verify_glp_with(
        checker.as_ref(),
        w.provenance(),
        &enumeration,
        gabor_glp::glp::VerifyOptions { max_witnesses: args.max_witnesses, ..Default::default() },
    )?;
    eprintln!("{} dependent, {:.2?}", r.dependent, r.elapsed);
    if let Some(path) = &args.witnesses {
        let file = fs::File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        write_witness_csv(&r, file)?;
    }
    let ok = r.dependent == 0;
    let construction = construction_for(&w, args.prime.prime_bits, args.prime.primes)?;
    let config = json!({
        "window": window_config(&args.window),
        "backend": backend,
        "budget": args.budget.to_string(),
        "max_witnesses": args.max_witnesses,
    });
    let report = Report::new("verify", n, config, construction, Some(WindowRecord::from_window(&w)?), r, start);
    emit(&report, &args.out)?;
    Ok(ok)
}

fn cmd_analyze(args: &AnalyzeArgs) -> CliResult {
    let start = Instant::now();
    let support = parse_support(&args.support, args.n)?;
    let result = analyze_support(&support, args.n, args.prime_bits, args.expand, args.budget)?;
    let ok = result.passed();
    let config = json!({
        "support": args.support,
        "prime_bits": args.prime_bits,
        "expand": args.expand,
        "budget": args.budget.to_string(),
    });
    emit(&Report::new("analyze", args.n, config, None, None, result, start), &args.out)?;
    Ok(ok)
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult {
    let start = Instant::now();
    let w = load_window(&args.window)?;
    let n = w.dim();
    let kept = args.kept.unwrap_or(n);
    let cw = w.to_complex();
    eprintln!("simulating {} trials, N={n}, {kept} of {} coefficients kept", args.trials, n * n);
    let trials = (0..args.trials)
        .into_par_iter()
        .map(|i| run_trial(&cw, kept, args.window.seed.wrapping_add(i), args.tolerance))
        .collect::<gabor_glp::Result<Vec<_>>>()?;
    let recovered = trials.iter().filter(|t| t.verdict == TrialVerdict::Recovered).count() as u64;
    let max_relative_error = trials.iter().filter_map(|t| t.relative_error).fold(None, |m: Option<f64>, e| {
        Some(m.map_or(e, |m| m.max(e)))
    });
    let summary = SimulationSummary {
        trials: args.trials,
        kept,
        recovered,
        failures: args.trials - recovered,
        max_relative_error,
        tolerance: args.tolerance,
    };
    let ok = summary.failures == 0;
    let result = SimulationResult { trials, summary };
    let config = json!({
        "window": window_config(&args.window),
        "trials": args.trials,
        "kept": kept,
        "tolerance": args.tolerance,
    });
    let report = Report::new("simulate", n, config, None, Some(WindowRecord::from_window(&w)?), result, start);
    emit(&report, &args.out)?;
    Ok(ok)
}

fn cmd_fourier(args: &FourierArgs) -> CliResult {
    let start = Instant::now();
    eprintln!("checking minors of the {0}x{0} DFT matrix", args.p);
    let r = fourier_minor_check(args.p, args.prime.prime_bits, args.prime.primes)?;
    let ok = r.pass;
    let config = json!({ "p": args.p, "prime_bits": args.prime.prime_bits, "primes": args.prime.primes });
    emit(&Report::new("fourier-check", args.p as usize, config, None, None, r, start), &args.out)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.workers {
        if k == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match &cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::FourierCheck(a) => cmd_fourier(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) | Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
