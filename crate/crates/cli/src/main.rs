//! `onel1` command-line tool.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 invalid input
//! data, 4 solver failure, 5 I/O failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use onel1::io::{default_out_dir, read_config_file, Command, RunConfig};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_SOLVER: u8 = 4;
pub const EXIT_IO: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "onel1", version, about = "Orthonormal-expansion l1 solvers and recovery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Recover a sparse vector from a measurement file.
    Solve(Flags),
    /// Estimate the recovery phase transition by Monte Carlo.
    PhaseTransition(Flags),
    /// Error, operator-call and timing statistics on fixed cells.
    Benchmark(Flags),
    /// Reconstruct an image from noisy partial 2-D DCT samples.
    ImageDemo(Flags),
    /// Quick operator, oracle and invariant checks.
    Selftest(Flags),
}

/// Flags shared by every subcommand. Each one overrides the key of the same
/// name in `--config`.
#[derive(Args, Debug, Default)]
struct Flags {
    /// Solver: eone-l1, rone-l1, ist, ist-fixed:<lambda>, amp. Repeatable.
    #[arg(long, value_delimiter = ',')]
    solver: Vec<String>,
    /// Operator ensemble: partial-dct or gaussian.
    #[arg(long)]
    ensemble: Option<String>,
    /// Number of measurements.
    #[arg(long)]
    n: Option<String>,
    /// Signal length (image side for image-demo).
    #[arg(long = "big-n")]
    big_n: Option<String>,
    /// Undersampling ratio(s) n/N. Repeatable.
    #[arg(long, value_delimiter = ',')]
    delta: Vec<String>,
    /// Sparsity ratio(s) k/n. Repeatable.
    #[arg(long, value_delimiter = ',')]
    rho: Vec<String>,
    /// Penalty growth ratio, or `auto` for the solver's recommendation.
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    tau1: Option<String>,
    #[arg(long)]
    tau2: Option<String>,
    /// Feasibility radius; positive values select first-feasible stopping.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long = "max-outer")]
    max_outer: Option<String>,
    #[arg(long = "max-inner")]
    max_inner: Option<String>,
    /// Measurement noise standard deviation.
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<String>,
    /// Haar decomposition depth for image-demo.
    #[arg(long)]
    levels: Option<String>,
    /// Output directory (default: $ONEL1_OUT or ./results).
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Use the full-size experiment grids.
    #[arg(long = "full-scale")]
    full_scale: bool,
    /// Measurement vector file (solve).
    #[arg(long)]
    input: Option<String>,
    /// Sampling mask file.
    #[arg(long)]
    mask: Option<String>,
    /// Grayscale PGM image (image-demo).
    #[arg(long)]
    image: Option<String>,
    /// Reference transition curve CSV (phase-transition).
    #[arg(long)]
    reference: Option<String>,
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long = "print-config")]
    print_config: bool,
}

impl Flags {
    fn pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut push = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v.clone()));
            }
        };
        push("ensemble", &self.ensemble);
        push("n", &self.n);
        push("big-n", &self.big_n);
        push("r", &self.r);
        push("alpha", &self.alpha);
        push("tau", &self.tau);
        push("tau1", &self.tau1);
        push("tau2", &self.tau2);
        push("epsilon", &self.epsilon);
        push("max-outer", &self.max_outer);
        push("max-inner", &self.max_inner);
        push("sigma", &self.sigma);
        push("trials", &self.trials);
        push("seed", &self.seed);
        push("levels", &self.levels);
        push("out", &self.out);
        push("format", &self.format);
        push("input", &self.input);
        push("mask", &self.mask);
        push("image", &self.image);
        push("reference", &self.reference);
        for (k, list) in [("solver", &self.solver), ("delta", &self.delta), ("rho", &self.rho)] {
            if !list.is_empty() {
                out.push((k.to_string(), list.join(",")));
            }
        }
        if self.full_scale {
            out.push(("full-scale".into(), "true".into()));
        }
        out
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = match &cli.command {
        Sub::Solve(f) => (Command::Solve, f),
        Sub::PhaseTransition(f) => (Command::PhaseTransition, f),
        Sub::Benchmark(f) => (Command::Benchmark, f),
        Sub::ImageDemo(f) => (Command::ImageDemo, f),
        Sub::Selftest(f) => (Command::Selftest, f),
    };

    let file_pairs = match &flags.config {
        Some(path) => match read_config_file(path) {
            Ok(p) => p,
            Err(e) => return fail(EXIT_USAGE, &e),
        },
        None => Vec::new(),
    };
    let cfg = match RunConfig::resolve(command, &file_pairs, &flags.pairs(), default_out_dir()) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_USAGE, &e),
    };
    if flags.print_config {
        print!("{}", cfg.to_config_string());
        return ExitCode::SUCCESS;
    }
    match commands::run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.code, &e.error),
    }
}

fn fail(code: u8, err: &dyn std::fmt::Display) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code)
}
