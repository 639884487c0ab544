//! `fneq` — canonicalise single-hidden-layer tanh network parameters,
//! decide functional equivalence, compute ranks and reductions, and build
//! and verify equal-function piecewise-linear paths.
//!
//! Exit codes: 0 success or positive verdict, 1 negative verdict, 2 input
//! error, 3 precondition violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fneq::{
    canonicalize, connect, equivalent, functions_equal, random_with_rank, rank, reduce_to_minimal,
    seven_segment_path, verify_path, Error as FneqError, Parameter, PathFile, Shape,
    ToleranceConfig,
};

#[derive(Parser)]
#[command(name = "fneq", version, about = "Functional equivalence toolkit for single-hidden-layer tanh networks")]
struct Cli {
    #[command(flatten)]
    config: Config,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Config {
    /// Absolute tolerance for weight comparisons.
    #[arg(long = "weight-tol", global = true, default_value_t = 1e-9)]
    weight_tol: f64,

    /// Absolute tolerance for function-value comparisons.
    #[arg(long = "func-tol", global = true, default_value_t = 1e-7)]
    func_tol: f64,

    /// Number of sampled inputs for function comparison.
    #[arg(long = "samples", global = true, default_value_t = 128)]
    samples: usize,

    /// Inputs are sampled from [-radius, radius]^n.
    #[arg(long = "radius", global = true, default_value_t = 5.0)]
    radius: f64,

    /// Seed for all pseudo-random sampling and generation.
    #[arg(long = "seed", global = true, default_value_t = 0)]
    seed: u64,

    /// Print extra per-segment detail where available.
    #[arg(long = "verbose", global = true)]
    verbose: bool,
}

impl Config {
    fn tolerances(&self) -> ToleranceConfig {
        ToleranceConfig {
            weight_tol: self.weight_tol,
            func_tol: self.func_tol,
            sample_count: self.samples,
            sample_radius: self.radius,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Canonicalise a parameter file.
    Canon {
        input: PathBuf,
        output: PathBuf,
        /// Also write the canonicalisation record (zeroed set, signs,
        /// permutation) to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Decide functional equivalence of two same-shape parameters.
    Equiv { a: PathBuf, b: PathBuf },
    /// Print the minimal hidden-unit count implementing the function.
    Rank { input: PathBuf },
    /// Write the fully reduced minimal parameter.
    Reduce { input: PathBuf, output: PathBuf },
    /// Build an equal-function path between two equivalent parameters.
    Path {
        a: PathBuf,
        b: PathBuf,
        output: PathBuf,
        /// Use the short construction (at most 7 segments); requires
        /// rank <= h/2.
        #[arg(long)]
        short: bool,
    },
    /// Verify a path file against its embedded reference parameter.
    VerifyPath { path_file: PathBuf },
    /// Generate a parameter of the given shape and exact rank.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        rank: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

enum CliError {
    Input(String),
    Lib(FneqError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Lib(err) => match err {
                FneqError::NotEquivalent => 1,
                FneqError::DiscreteClass
                | FneqError::RankTooHigh { .. }
                | FneqError::RankMismatch(..) => 3,
                _ => 2,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Input(msg) => msg.clone(),
            CliError::Lib(err) => err.to_string(),
        }
    }
}

impl From<FneqError> for CliError {
    fn from(err: FneqError) -> Self {
        CliError::Lib(err)
    }
}

fn read_parameter(path: &Path) -> Result<Parameter, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("cannot parse {}: {e}", path.display())))
}

fn read_path_file(path: &Path) -> Result<PathFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("cannot parse {}: {e}", path.display())))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string(value)
        .map_err(|e| CliError::Input(format!("cannot serialise output: {e}")))?;
    text.push('\n');
    fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let tol = cli.config.tolerances();
    let seed = cli.config.seed;
    match &cli.command {
        Command::Canon { input, output, trace } => {
            let w = read_parameter(input)?;
            let record = canonicalize(&w, &tol);
            write_json(output, &record.canonical)?;
            if let Some(trace_path) = trace {
                write_json(trace_path, &record)?;
            }
            if cli.config.verbose {
                eprintln!(
                    "zeroed {} of {} units",
                    record.zeroed.len(),
                    w.hidden_count()
                );
            }
            Ok(0)
        }
        Command::Equiv { a, b } => {
            let wa = read_parameter(a)?;
            let wb = read_parameter(b)?;
            if equivalent(&wa, &wb, &tol)? {
                println!("equivalent");
                Ok(0)
            } else {
                println!("not equivalent");
                Ok(1)
            }
        }
        Command::Rank { input } => {
            let w = read_parameter(input)?;
            println!("{}", rank(&w, &tol));
            Ok(0)
        }
        Command::Reduce { input, output } => {
            let w = read_parameter(input)?;
            let minimal = reduce_to_minimal(&w, &tol);
            write_json(output, &minimal)?;
            // Reduction changes the hidden-unit count, so equivalence with
            // the input is reported by function sampling.
            if functions_equal(&w, &minimal, &tol, seed)? {
                println!("functionally equal (sampled)");
                Ok(0)
            } else {
                println!("functionally unequal (sampled)");
                Ok(1)
            }
        }
        Command::Path { a, b, output, short } => {
            let wa = read_parameter(a)?;
            let wb = read_parameter(b)?;
            let path = if *short {
                seven_segment_path(&wa, &wb, &tol)?
            } else {
                connect(&wa, &wb, &tol)?
            };
            write_json(output, &PathFile::new(wa, &path))?;
            println!("{}", path.segment_count());
            Ok(0)
        }
        Command::VerifyPath { path_file } => {
            let file = read_path_file(path_file)?;
            let path = file.path()?;
            let report = verify_path(&path, &file.reference, &tol, 9, seed)?;
            println!("max deviation {:e}", report.max_deviation);
            if cli.config.verbose {
                for (s, dev) in report.segment_deviations.iter().enumerate() {
                    println!("segment {s}: max deviation {dev:e}");
                }
            }
            if report.ok {
                Ok(0)
            } else {
                eprintln!(
                    "worst segment {} deviates by {:e}",
                    report.worst_segment, report.max_deviation
                );
                Ok(1)
            }
        }
        Command::Gen { n, m, h, rank: target, output } => {
            let shape =
                Shape::new(*n, *m, *h).map_err(|e| CliError::Input(e.to_string()))?;
            let w = random_with_rank(shape, *target, seed, &tol)
                .map_err(|e| CliError::Input(e.to_string()))?;
            debug_assert_eq!(rank(&w, &tol), *target);
            write_json(output, &w)?;
            if cli.config.verbose {
                eprintln!("generated rank-{target} parameter with h = {h}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
