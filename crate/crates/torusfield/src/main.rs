//! Command-line entry point.
//!
//! `torusfield <experiment> --config <path> [--seed S] [--out PATH]
//! [--threads P] [--csv PATH]` runs one experiment from a plain-text config,
//! appending line-delimited JSON records to the output path (or printing
//! them to stdout). `torusfield shell --energy E` prints the lattice shell.

use std::error::Error;
use std::fs::File;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use torusfield::harness::{self, ExperimentConfig, ExperimentKind};
use torusfield::lattice::LatticeShell;

#[derive(Parser)]
#[command(
    name = "torusfield",
    version,
    about = "Nodal statistics of random Laplace eigenfunctions on the 3-torus along curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file (`key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Override the config master_seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config output path (line-delimited JSON records)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Also write the records as a CSV table to this path
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo mean of the normalized zero count vs the 2L/√3 prediction
    Expectation(RunArgs),
    /// Monte Carlo variance across an energy ladder with bootstrap intervals
    Variance(RunArgs),
    /// Deterministic second-moment functional R₂(E) across energies
    #[command(name = "r2-scaling")]
    R2Scaling(RunArgs),
    /// Riesz s-energies of projected shells vs the uniform-sphere limit
    Riesz(RunArgs),
    /// Oscillatory-integral decay fit along the configured curve
    Oscillatory(RunArgs),
    /// Singular-cube census of the two-point correlation domain
    Singular(RunArgs),
    /// Shell sizes and admissibility flags across an energy range
    #[command(name = "shell-census")]
    ShellCensus(RunArgs),
    /// Print N_E and the lattice points of one shell
    Shell {
        /// Energy E (squared frequency)
        #[arg(long)]
        energy: i64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Expectation(args) => execute(ExperimentKind::Expectation, args),
        Command::Variance(args) => execute(ExperimentKind::Variance, args),
        Command::R2Scaling(args) => execute(ExperimentKind::R2Scaling, args),
        Command::Riesz(args) => execute(ExperimentKind::Riesz, args),
        Command::Oscillatory(args) => execute(ExperimentKind::Oscillatory, args),
        Command::Singular(args) => execute(ExperimentKind::Singular, args),
        Command::ShellCensus(args) => execute(ExperimentKind::ShellCensus, args),
        Command::Shell { energy } => print_shell(energy),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(kind: ExperimentKind, args: RunArgs) -> Result<(), Box<dyn Error>> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if config.experiment != kind {
        return Err(format!(
            "config {} declares experiment '{}', but the '{}' subcommand was invoked",
            args.config.display(),
            config.experiment,
            kind
        )
        .into());
    }
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(out) = args.out {
        config.output = Some(out);
    }
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }

    let timestamp = chrono::Utc::now().to_rfc3339();
    let records = harness::run(&config, &timestamp)?;

    match &config.output {
        Some(path) => {
            harness::append_jsonl(path, &records)?;
            eprintln!("appended {} records to {}", records.len(), path.display());
        }
        None => harness::write_jsonl(&records, io::stdout().lock())?,
    }
    if let Some(csv_path) = &args.csv {
        harness::write_csv(&records, File::create(csv_path)?)?;
        eprintln!("wrote CSV table to {}", csv_path.display());
    }
    Ok(())
}

fn print_shell(energy: i64) -> Result<(), Box<dyn Error>> {
    let shell = LatticeShell::enumerate(energy)?;
    println!("E = {energy}: N_E = {}", shell.count());
    for p in shell.points() {
        println!("{} {} {}", p.x, p.y, p.z);
    }
    Ok(())
}
