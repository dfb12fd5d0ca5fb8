use clap::{Parser, Subcommand};
use idemlab::cli::{self, CommandReport, ExitClass};
use idemlab::error::Error;
use num_complex::Complex64;
use serde_json::json;
use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

/// Numerical laboratory for idempotent operators: canonical forms,
/// invariant subspaces, spectral projections, and randomized trial suites.
#[derive(Parser)]
#[command(name = "idemlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Input matrix file (JSON); stdin is read when omitted
    #[arg(long, global = true, value_name = "FILE")]
    r#in: Option<PathBuf>,

    /// Override the command's default tolerance (also via IDEMLAB_TOL)
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Seed for every randomized part of a command
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Contour quadrature nodes
    #[arg(long, global = true, default_value_t = 256)]
    nodes: usize,

    /// Emit the report as JSON (default)
    #[arg(long, global = true)]
    json: bool,

    /// Emit the command's primary eigenvalue list as CSV instead of JSON
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,

    /// Escalate conditioning warnings to exit code 3
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an idempotent and emit its block form, similarity and witness
    Decompose,
    /// Composition-operator demo on polynomial coefficients
    Hardy {
        #[arg(long, default_value_t = 0.5)]
        alpha_re: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha_im: f64,
        #[arg(long, default_value_t = 8)]
        degree: usize,
    },
    /// Quasinilpotent operator -> block pair -> certified invariant subspace
    PipelineNrr,
    /// Seeded randomized trial suites (ando, lat-equiv, spectra-identity,
    /// commutator-identity, riesz, pairs, essential)
    Trials {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        max_dim: Option<usize>,
    },
}

fn read_matrix(path: &Option<PathBuf>) -> Result<idemlab::CMatrix, Error> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", p.display())))?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::Parse(format!("cannot read stdin: {e}")))?;
            buf
        }
    };
    cli::parse_matrix(&text)
}

fn resolve_tol(flag: Option<f64>) -> Option<f64> {
    flag.or_else(|| std::env::var("IDEMLAB_TOL").ok().and_then(|s| s.parse().ok()))
}

fn exit_code_for_error(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::UnknownSuite(_) | Error::BadParameters(_) => 1,
        _ => 2,
    }
}

fn run(cli: &Cli) -> Result<CommandReport, Error> {
    let tol = resolve_tol(cli.tol);
    if cli.nodes < 16 {
        return Err(Error::BadParameters(format!("--nodes must be >= 16, got {}", cli.nodes)));
    }
    match &cli.command {
        Command::Decompose => {
            let t = read_matrix(&cli.r#in)?;
            cli::cmd_decompose(&t, tol)
        }
        Command::Hardy { alpha_re, alpha_im, degree } => {
            cli::cmd_hardy(Complex64::new(*alpha_re, *alpha_im), *degree, cli.seed, tol)
        }
        Command::PipelineNrr => {
            let a = read_matrix(&cli.r#in)?;
            cli::cmd_pipeline_nrr(&a)
        }
        Command::Trials { suite, count, max_dim } => {
            cli::cmd_trials(suite, *count, cli.seed, *max_dim)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(&cli) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if cli.csv {
                if report.primary_spectrum.is_empty() {
                    eprintln!("error: `{}` has no eigenvalue list to export", report.command);
                    std::process::exit(1);
                }
                print!("{}", cli::spectrum_csv(&report.primary_spectrum));
            } else {
                let envelope = json!({
                    "command": report.command,
                    "seed": cli.seed,
                    "pass": report.pass,
                    "warnings": report.warnings,
                    "outputs": report.body,
                    "wall_ms": started.elapsed().as_millis() as u64,
                });
                println!("{}", serde_json::to_string_pretty(&envelope).expect("report json"));
            }
            if cli.strict && !report.warnings.is_empty() {
                std::process::exit(3);
            }
            match report.exit_class {
                ExitClass::Success => std::process::exit(0),
                ExitClass::Validation => std::process::exit(2),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code_for_error(&e));
        }
    }
}
