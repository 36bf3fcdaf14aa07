//! `expansive`: command-line front end for the expansiveness analyses.

mod case;
mod commands;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use expansive_core::Mode;

#[derive(Parser, Debug)]
#[command(name = "expansive", version, about = "Expansiveness of linear, toral and solenoidal actions")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// semigroup or group; overrides the case file
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    /// Word length for searches and chain levels
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Escape radius for orbit probes
    #[arg(long, global = true)]
    pub radius: Option<String>,
    /// Separation constant for the rational grid oracle
    #[arg(long, global = true)]
    pub epsilon: Option<String>,
    /// Largest relation cost accepted by the chain search
    #[arg(long, global = true)]
    pub kmax: Option<u64>,
    /// Bits of dyadic precision for windows and lifts
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Grid modulus q for the rational orbit oracle (torus-check)
    #[arg(long, global = true)]
    pub grid: Option<u64>,
    /// Bound C for lifts; defaults to 1/(k+1)
    #[arg(long, global = true)]
    pub bound: Option<String>,
    /// Functional p to lift, comma-separated rationals
    #[arg(long, global = true)]
    pub point: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Root profile and expansiveness of a single matrix
    AnalyzeMatrix { case: PathBuf },
    /// Escape-chain check of a finitely generated action
    AnalyzeSemigroup { case: PathBuf },
    /// Search a commuting group action for one expansive element
    FindExpansive { case: PathBuf },
    /// Expansiveness of an integer action on the torus
    TorusCheck { case: PathBuf },
    /// Joint spectral radius bounds
    Jsr { case: PathBuf },
    /// k-regular chain of a dual module
    SolenoidChain { case: PathBuf },
    /// Lift E(p) back along the chain
    SolenoidLift { case: PathBuf },
    /// Expansiveness of a solenoid action
    SolenoidCheck { case: PathBuf },
    /// Re-check the certificates in a report against its case
    Verify { report: PathBuf, case: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.flags.threads > 0 {
        // Fails only if a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.flags.threads).build_global();
    }
    let code = match cli.command {
        Command::Verify { report, case } => verify::run(&report, &case),
        cmd => {
            let (name, case) = match cmd {
                Command::AnalyzeMatrix { case } => ("analyze-matrix", case),
                Command::AnalyzeSemigroup { case } => ("analyze-semigroup", case),
                Command::FindExpansive { case } => ("find-expansive", case),
                Command::TorusCheck { case } => ("torus-check", case),
                Command::Jsr { case } => ("jsr", case),
                Command::SolenoidChain { case } => ("solenoid-chain", case),
                Command::SolenoidLift { case } => ("solenoid-lift", case),
                Command::SolenoidCheck { case } => ("solenoid-check", case),
                Command::Verify { .. } => unreachable!(),
            };
            commands::run(name, &case, &cli.flags)
        }
    };
    ExitCode::from(code)
}
