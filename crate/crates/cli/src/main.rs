//! `qchain`: steady states, sweeps and figure datasets for qubit chains
//! between two thermal baths.
//!
//! Exit codes: 0 success, 1 verification breach or runtime failure,
//! 2 usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qchain_core::csv::{emit_csv, write_csv};
use qchain_core::presets::write_figures;
use qchain_core::{
    parse_config, parse_spec, run_sweep, run_verification, Approach, ChainSpec, Error, OpenChain,
};

#[derive(Parser)]
#[command(name = "qchain", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one chain and print populations and heat fluxes.
    Steady(SteadyArgs),
    /// Run the sweep described by a config file and write CSV.
    Sweep(SweepArgs),
    /// Write the built-in figure datasets (figure2.csv, figure3{a,b,c}.csv).
    Figures {
        /// Output directory.
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Compare the numerical pipeline with the closed forms.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproachArg {
    Local,
    Global,
    Both,
}

impl ApproachArg {
    fn approaches(self) -> Vec<Approach> {
        match self {
            ApproachArg::Local => vec![Approach::Local],
            ApproachArg::Global => vec![Approach::Global],
            ApproachArg::Both => Approach::ALL.to_vec(),
        }
    }
}

#[derive(Args)]
struct SteadyArgs {
    /// Read the chain from a config file instead of the flags below.
    #[arg(long, conflicts_with_all = ["epsilons", "couplings", "t1", "t2"])]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    approach: ApproachArg,
    /// Qubit gaps, comma separated.
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    epsilons: Vec<f64>,
    /// Nearest-neighbour couplings, comma separated.
    #[arg(long, value_delimiter = ',')]
    couplings: Vec<f64>,
    #[arg(long, required_unless_present = "config")]
    t1: Option<f64>,
    #[arg(long, required_unless_present = "config")]
    t2: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    gamma1: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma2: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the approaches listed in the config.
    #[arg(long, value_enum)]
    approach: Option<ApproachArg>,
    /// CSV destination; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidSpec(_) | Error::NTooLarge(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn steady(args: SteadyArgs) -> Result<(), Failure> {
    let spec = match &args.config {
        Some(path) => parse_spec(&read(path)?).map_err(Error::from)?,
        None => ChainSpec::new(
            args.epsilons,
            args.couplings,
            args.t1.unwrap_or_default(),
            args.t2.unwrap_or_default(),
        )
        .with_gammas(args.gamma1, args.gamma2),
    };
    for approach in args.approach.approaches() {
        let report = OpenChain::build(&spec, approach)?.solve()?;
        println!("approach: {approach}");
        for (i, n) in report.populations.iter().enumerate() {
            println!("  n{} = {n:.12}", i + 1);
        }
        println!("  Q1 = {:.12e}", report.fluxes[0]);
        println!("  Q2 = {:.12e}", report.fluxes[1]);
        println!("  residual = {:.3e}", report.residual);
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), Failure> {
    let mut req = parse_config(&read(&args.config)?).map_err(Error::from)?;
    if let Some(a) = args.approach {
        req.approaches = a.approaches();
    }
    let table = run_sweep(&req, args.workers)?;
    match args.out {
        Some(path) => write_csv(&path, &table, &[])
            .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?,
        None => print!("{}", emit_csv(&table, &[])),
    }
    if table.skipped() > 0 {
        eprintln!(
            "warning: {} grid points skipped (degenerate transition)",
            table.skipped()
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Steady(args) => steady(args),
        Command::Sweep(args) => sweep(args),
        Command::Figures { out, workers } => {
            for path in write_figures(&out, workers)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Verify => {
            let report = run_verification()?;
            for check in &report.checks {
                println!("{check}");
            }
            if report.passed() {
                Ok(())
            } else {
                let failed = report.checks.iter().filter(|c| !c.passed()).count();
                Err(Failure::Runtime(format!(
                    "{failed} check(s) exceeded tolerance"
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
