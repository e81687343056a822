//! Batch front door for the spsum library: JSON in, CSV out.
//!
//! Exit codes follow the reference driver convention: 0 success, 1 result
//! produced but flagged unreliable, 2 usage error (bad flags, unreadable
//! input, malformed JSON), 3 numerical error with the module diagnostic on
//! stderr. All floats are serialized with 17 significant digits and LF line
//! endings so output re-imports bit-faithfully.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use spsum::core::dense::Mat;
use spsum::core::single_pair::sp_materialize;
use spsum::core::sum::SpSum;
use spsum::core::tridiag::{tridiag_inverse_meurant, SymTridiagonal};
use spsum::factor::{
    sum_factor_single_pair, sum_factor_single_pair_scaled, sum_factor_tridiagonal,
    tridiag_inverse_factored,
};
use spsum::gram::{gamma_coefficients, gram_inverse, RampSystem};
use spsum::inverse::{sp_sum_inverse, unpack};
use spsum::stability::{
    det_family_csv, det_family_experiment, spectrum_csv, spectrum_experiment,
};
use spsum::{Scalar, Status};

#[derive(Parser)]
#[command(name = "spsum", version, about = "Invert and factorize sums of single-pair matrices")]
struct Cli {
    /// Print per-run diagnostics (warnings, benchmark failure counts) to stderr.
    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Invert the sum given as JSON {a, b, c, x, z, tol}; emits the dense inverse as CSV.
    Invert(InvertArgs),
    /// Emit factorization sequences for the sum: alpha/beta, u/v, or the scaled pair.
    Factorize(FactorizeArgs),
    /// Invert a symmetric tridiagonal matrix given as JSON {alpha, beta, tol}.
    TridiagInvert(TridiagInvertArgs),
    /// Invert the ramp-function Gram matrix for the given shift knots.
    Gram(GramArgs),
    /// Sweep the closed-form determinant family and emit per-epsilon mean absolute errors.
    BenchDet(BenchDetArgs),
    /// Sweep the prescribed-spectrum grid and emit error statistics per epsilon.
    BenchSpectrum(BenchSpectrumArgs),
}

#[derive(Args)]
struct InputArgs {
    /// JSON input path, or - for stdin.
    #[arg(default_value = "-")]
    input: String,

    /// Zero-test tolerance; overrides the JSON field.
    #[arg(long)]
    tol: Option<f64>,

    /// First free parameter; overrides the JSON field.
    #[arg(long)]
    x: Option<f64>,

    /// Second free parameter; overrides the JSON field.
    #[arg(long)]
    z: Option<f64>,

    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InvertArgs {
    #[command(flatten)]
    io: InputArgs,
}

#[derive(Args)]
struct FactorizeArgs {
    #[command(flatten)]
    io: InputArgs,

    /// Which factorization to emit: t1 (alpha/beta tridiagonal), t3 (u/v
    /// pair), or t4 (scaled pair with its coupling coefficients).
    #[arg(long, default_value = "t1", value_parser = ["t1", "t3", "t4"])]
    variant: String,
}

#[derive(Args)]
struct TridiagInvertArgs {
    #[command(flatten)]
    io: InputArgs,

    /// Inversion path: the closed-form generator recursion, or the
    /// single-pair rewrite driven by the free parameters --x and --z.
    #[arg(long, default_value = "meurant", value_parser = ["meurant", "factored"])]
    method: String,
}

#[derive(Args)]
struct GramArgs {
    /// Comma-separated shift knots, strictly increasing in (0, 1].
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<f64>,

    /// Expected number of knots; checked against --k when given.
    #[arg(long)]
    n: Option<usize>,

    /// Also emit gap-polynomial coefficient tables for degrees 1..=MAX,
    /// one `gamma,<degree>` header per table followed by one line per
    /// monomial (gap exponents, then the integer coefficient).
    #[arg(long)]
    gamma_max: Option<usize>,

    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchDetArgs {
    /// Number of log-spaced epsilon samples in [1e-6, 1e-1].
    #[arg(long, default_value_t = 30)]
    count: usize,

    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchSpectrumArgs {
    /// Comma-separated epsilon values, one sweep per value.
    #[arg(long, value_delimiter = ',', default_values_t = [1e-4])]
    eps: Vec<f64>,

    /// Grid step for the three swept parameters; must divide the range [-1, 1].
    #[arg(long, default_value_t = 0.1)]
    grid_step: f64,

    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// JSON shape for the sum of two single-pair matrices. Arrays are the plain
/// generator sequences without internal sentinels.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SumInput {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    x: Option<f64>,
    z: Option<f64>,
    tol: Option<f64>,
}

/// JSON shape for a symmetric tridiagonal matrix: diagonal `alpha` (length
/// n) and coupling `beta` (length n-1, stored sign convention).
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TridiagInput {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    tol: Option<f64>,
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl Failure {
    fn report(self) -> u8 {
        match self {
            Failure::Usage(msg) => {
                eprintln!("error: {msg}");
                2
            }
            Failure::Numeric(msg) => {
                eprintln!("error: {msg}");
                3
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let code = match dispatch(&cli) {
        Ok(code) => code,
        Err(f) => f.report(),
    };
    ExitCode::from(code)
}

/// SPSUM_THREADS caps the parallelism of the benchmark sweeps.
fn configure_threads() {
    if let Ok(raw) = std::env::var("SPSUM_THREADS") {
        match raw.parse::<usize>() {
            Ok(t) if t >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            _ => eprintln!("warning: ignoring SPSUM_THREADS={raw}: not a positive integer"),
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Invert(a) => run_invert(a, cli.verbose),
        Command::Factorize(a) => run_factorize(a),
        Command::TridiagInvert(a) => run_tridiag_invert(a),
        Command::Gram(a) => run_gram(a),
        Command::BenchDet(a) => run_bench_det(a, cli.verbose),
        Command::BenchSpectrum(a) => run_bench_spectrum(a, cli.verbose),
    }
}

fn read_source(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("reading {path}: {e}")))
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| Failure::Usage(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn matrix_csv(m: &Mat<f64>) -> String {
    let mut csv = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| fmt(m[(i, j)])).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    csv
}

fn parse_sum(io: &InputArgs) -> Result<SpSum<f64>, Failure> {
    let text = read_source(&io.input)?;
    let input: SumInput =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("parsing JSON: {e}")))?;
    let x = io.x.or(input.x).unwrap_or(0.0);
    let z = io.z.or(input.z).unwrap_or(1.0);
    let tol = io.tol.or(input.tol).unwrap_or_else(f64::default_tol);
    SpSum::new(input.a, input.b, input.c, x, z, tol)
        .map_err(|e| Failure::Numeric(format!("{e} (status {})", e.code())))
}

fn run_invert(args: &InvertArgs, verbose: bool) -> Result<u8, Failure> {
    let s = parse_sum(&args.io)?;
    let rep = sp_sum_inverse(&s);
    let Some(ref packed) = rep.result else {
        return Err(Failure::Numeric(format!("{} (status {})", rep.message, rep.code())));
    };
    emit(&args.io.out, &matrix_csv(unpack(&packed).mat()))?;
    match rep.status {
        Status::WarningUnreliable { .. } => {
            eprintln!("warning: {}", rep.message);
            Ok(1)
        }
        _ => {
            if verbose {
                eprintln!("inverted n={} (status {})", s.n(), rep.code());
            }
            Ok(0)
        }
    }
}

fn run_factorize(args: &FactorizeArgs) -> Result<u8, Failure> {
    let s = parse_sum(&args.io)?;
    let numeric = |e: spsum::Error| Failure::Numeric(format!("{e} (status {})", e.code()));
    let n = s.n();
    let mut csv = String::new();
    match args.variant.as_str() {
        "t1" => {
            let f = sum_factor_tridiagonal(&s).map_err(numeric)?;
            csv.push_str("i,alpha,beta\n");
            for i in 1..=n {
                csv.push_str(&format!("{i},{},{}\n", fmt(f.tridiag().alpha(i)), fmt(f.beta(i))));
            }
        }
        "t3" => {
            let f = sum_factor_single_pair(&s).map_err(numeric)?;
            csv.push_str("i,u,v,delta\n");
            for i in 1..=n {
                csv.push_str(&format!("{i},{},{},{}\n", fmt(f.u(i)), fmt(f.v(i)), fmt(f.delta(i))));
            }
        }
        _ => {
            let f = sum_factor_single_pair_scaled(&s).map_err(numeric)?;
            csv.push_str("i,u_scaled,v_scaled,beta,delta\n");
            for i in 1..=n {
                csv.push_str(&format!(
                    "{i},{},{},{},{}\n",
                    fmt(f.u_scaled(i)),
                    fmt(f.v_scaled(i)),
                    fmt(f.beta(i)),
                    fmt(f.delta(i))
                ));
            }
        }
    }
    emit(&args.io.out, &csv)?;
    Ok(0)
}

fn run_tridiag_invert(args: &TridiagInvertArgs) -> Result<u8, Failure> {
    let text = read_source(&args.io.input)?;
    let input: TridiagInput =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("parsing JSON: {e}")))?;
    let numeric = |e: spsum::Error| Failure::Numeric(format!("{e} (status {})", e.code()));
    let tol = args.io.tol.or(input.tol).unwrap_or_else(f64::default_tol);
    let t = SymTridiagonal::new(input.alpha, input.beta).map_err(numeric)?;
    let dense = match args.method.as_str() {
        "meurant" => {
            let gens = tridiag_inverse_meurant(&t, tol).map_err(numeric)?;
            sp_materialize(&gens)
        }
        _ => {
            let x = args.io.x.unwrap_or(1.0);
            let y = args.io.z.unwrap_or(1.0);
            tridiag_inverse_factored(&t, x, y, tol)
                .and_then(|f| f.to_dense())
                .map_err(numeric)?
        }
    };
    emit(&args.io.out, &matrix_csv(dense.mat()))?;
    Ok(0)
}

fn run_gram(args: &GramArgs) -> Result<u8, Failure> {
    if let Some(n) = args.n {
        if n != args.k.len() {
            return Err(Failure::Usage(format!(
                "--n {n} does not match the {} knots given via --k",
                args.k.len()
            )));
        }
    }
    let numeric = |e: spsum::Error| Failure::Numeric(format!("{e} (status {})", e.code()));
    let ramp: RampSystem<f64> = RampSystem::new(args.k.clone()).map_err(numeric)?;
    let inv = gram_inverse(&ramp).map_err(numeric)?;
    let mut csv = matrix_csv(inv.mat());
    if let Some(max_degree) = args.gamma_max {
        for degree in 1..=max_degree {
            let table = gamma_coefficients(degree).map_err(numeric)?;
            csv.push_str(&format!("gamma,{degree}\n"));
            csv.push_str(&table.export_rows());
        }
    }
    emit(&args.out, &csv)?;
    Ok(0)
}

fn run_bench_det(args: &BenchDetArgs, verbose: bool) -> Result<u8, Failure> {
    if args.count < 2 {
        return Err(Failure::Usage("--count must be at least 2".into()));
    }
    let report = det_family_experiment(args.count);
    if verbose {
        for (eps, msg) in &report.failures {
            eprintln!("failure at epsilon {eps}: {msg}");
        }
    }
    if report.records.is_empty() {
        return Err(Failure::Numeric("every sweep point failed".into()));
    }
    emit(&args.out, &det_family_csv(&report.records))?;
    Ok(0)
}

fn run_bench_spectrum(args: &BenchSpectrumArgs, verbose: bool) -> Result<u8, Failure> {
    let mut reports = Vec::new();
    for &eps in &args.eps {
        let rep = spectrum_experiment(eps, args.grid_step)
            .map_err(|e| Failure::Usage(format!("{e}")))?;
        if verbose {
            eprintln!(
                "epsilon {eps}: {} solved matrices, {} inversion failures",
                rep.solved, rep.failures
            );
        }
        reports.push(rep);
    }
    emit(&args.out, &spectrum_csv(&reports))?;
    Ok(0)
}
