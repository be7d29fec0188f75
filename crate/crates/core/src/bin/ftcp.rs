use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ftcp::cli::{error_exit_code, run, Command, RunOptions};

#[derive(Parser)]
#[command(
    name = "ftcp",
    version,
    about = "Finite-time cyclic pursuit and cooperative interception"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact event-driven consensus run
    Consensus(Opts),
    /// Gain synthesis for a target time and value
    Synth(Opts),
    /// Planar multi-missile engagement
    Engage(Opts),
    /// Negative-gain robustness sweep
    Sweep(Opts),
    /// Compare the event engine with the ODE integrator
    OracleCheck(Opts),
}

#[derive(Args)]
struct Opts {
    /// Scenario file (TOML)
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory; overrides [output].dir
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integration step in seconds
    #[arg(long)]
    dt: Option<f64>,
    /// Keep every k-th sample in trajectory CSVs
    #[arg(long)]
    decimate: Option<usize>,
    /// Worker threads for sweep and oracle-check
    #[arg(long)]
    parallel: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, o) = match cli.command {
        Cmd::Consensus(o) => (Command::Consensus, o),
        Cmd::Synth(o) => (Command::Synth, o),
        Cmd::Engage(o) => (Command::Engage, o),
        Cmd::Sweep(o) => (Command::Sweep, o),
        Cmd::OracleCheck(o) => (Command::OracleCheck, o),
    };
    let opts = RunOptions {
        scenario: o.scenario,
        out: o.out,
        dt: o.dt,
        decimate: o.decimate,
        parallel: o.parallel,
    };
    match run(command, &opts) {
        Ok(report) => {
            print!("{}", report.summary);
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("ftcp: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
