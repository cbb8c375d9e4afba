//! `zosah` — run zeroth-order optimizers on benchmark objectives and
//! summarize the resulting convergence traces.
//!
//! Exit status: 0 on success, 2 for usage errors (bad flags, unknown ids,
//! invalid hyperparameters), 3 for data errors (unreadable or malformed
//! datasets and trace files, I/O failures).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zosah_core::harness::{
    checkpoint_grid, load_run_dir, run_experiment, summarize, summary_to_csv, ExperimentConfig, DEFAULT_GRID_STEP,
};
use zosah_core::Error;

#[derive(Parser)]
#[command(name = "zosah", version, about = "Zeroth-order optimization benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one objective for a list of seeds.
    Run(Box<RunArgs>),
    /// Reduce a run directory to mean/std/min/max per evaluation checkpoint.
    Summarize(SummarizeArgs),
}

/// Flags left unset fall back to the config file, then to the defaults.
#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file using the flag names as keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// zosah | zosah-diag | zosah-fd | rspg | signsgd | adamm
    #[arg(long)]
    alg: Option<String>,
    /// rosenbrock | logistic:<path> | synthetic-a3a[:<seed>]
    #[arg(long)]
    obj: Option<String>,
    /// auto | zeros | standard-rosenbrock | comma-separated coordinates
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Evaluation budget per seed.
    #[arg(long)]
    evals: Option<String>,
    /// e.g. `0,1,2`, `0..10` or `0..=9`.
    #[arg(long)]
    seeds: Option<String>,
    /// Intermediate subspace dimension (even).
    #[arg(long)]
    m: Option<String>,
    /// Subspace switching period.
    #[arg(long = "T")]
    period: Option<String>,
    /// Finite-difference step.
    #[arg(long)]
    eps: Option<String>,
    /// Eigenvalue floor of the Hessian repair.
    #[arg(long)]
    kappa: Option<String>,
    /// Radius of the fresh Hessian samples.
    #[arg(long = "hess-radius")]
    hess_radius: Option<String>,
    /// Gram eigenvalue below which the fit is ridge-regularized.
    #[arg(long = "gamma-floor")]
    gamma_floor: Option<String>,
    /// Random directions per gradient estimate (baselines).
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    beta1: Option<String>,
    #[arg(long)]
    beta2: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    /// Output directory for `seed_<s>.csv` and `combined.csv`.
    #[arg(long)]
    out: PathBuf,
}

impl RunArgs {
    fn overrides(&self) -> [(&'static str, Option<&String>); 15] {
        [
            ("alg", self.alg.as_ref()),
            ("obj", self.obj.as_ref()),
            ("x0", self.x0.as_ref()),
            ("evals", self.evals.as_ref()),
            ("seeds", self.seeds.as_ref()),
            ("m", self.m.as_ref()),
            ("T", self.period.as_ref()),
            ("eps", self.eps.as_ref()),
            ("kappa", self.kappa.as_ref()),
            ("hess-radius", self.hess_radius.as_ref()),
            ("gamma-floor", self.gamma_floor.as_ref()),
            ("q", self.q.as_ref()),
            ("beta1", self.beta1.as_ref()),
            ("beta2", self.beta2.as_ref()),
            ("delta", self.delta.as_ref()),
        ]
    }

    fn config(&self) -> Result<ExperimentConfig, Failure> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
            cfg.apply_kv(&text)?;
        }
        for (key, value) in self.overrides() {
            if let Some(v) = value {
                cfg.set(key, v).map_err(|e| Failure::usage(format!("--{key}: {e}")))?;
            }
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct SummarizeArgs {
    /// Run directory written by `zosah run`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Checkpoint spacing in evaluations.
    #[arg(long, default_value_t = DEFAULT_GRID_STEP, value_parser = clap::value_parser!(u64).range(1..))]
    grid: u64,
    /// Summary CSV; written to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: String) -> Self {
        Self { code: 2, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::DimensionMismatch { .. } => 2,
            _ => 3,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn run(args: RunArgs) -> Result<(), Failure> {
    let cfg = args.config()?;
    let out = run_experiment(&cfg, &args.out)?;
    for (seed, trace) in cfg.seeds.iter().zip(&out.traces) {
        match (trace.final_value(), trace.total_evals()) {
            (Some(f), Some(n)) => println!("seed {seed}: f = {f:.6e} after {n} evaluations"),
            _ => println!("seed {seed}: no evaluations"),
        }
    }
    println!("wrote {} traces to {}", out.traces.len(), args.out.display());
    Ok(())
}

fn summarize_cmd(args: SummarizeArgs) -> Result<(), Failure> {
    let traces = load_run_dir(&args.input)?;
    let max = traces.iter().filter_map(|t| t.total_evals()).max().unwrap_or(0);
    let grid = checkpoint_grid(args.grid, max)?;
    let csv = summary_to_csv(&summarize(&traces, &grid)?);
    match args.out {
        Some(path) => fs::write(path, csv).map_err(Error::from)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(*args),
        Command::Summarize(args) => summarize_cmd(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("zosah: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
