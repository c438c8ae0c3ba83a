use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

/// Silhouette-based choice of the number of communities in weighted
/// networks, plus the SBM benchmark harness and the case studies.
#[derive(Parser, Debug)]
#[command(name = "netsil", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a simulation suite and write replicates.csv, summary.csv and suite.json.
    Simulate(SimulateArgs),
    /// Select K for one weighted graph given as a tab-separated edge list.
    Cluster(ClusterArgs),
    /// Cluster the airline reachability network.
    Airline(AirlineArgs),
    /// Run the concentric rings example.
    Rings(RingsArgs),
    /// List the built-in suites, or write them out as JSON configs.
    Suites(SuitesArgs),
    /// Print version and random generator information.
    Version,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["suite", "config"]))]
struct SimulateArgs {
    /// Name of a built-in suite (see `netsil suites`).
    #[arg(long)]
    suite: Option<String>,
    /// Suite config: a JSON array of scenario specs.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Override the replicate count of every scenario.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    replicates: Option<u64>,
    /// Override the master seed of every scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    /// Fill the runtime_ms column (makes replicates.csv differ between runs).
    #[arg(long)]
    record_timing: bool,
}

#[derive(Args, Debug)]
struct ClusterArgs {
    /// Edge list: `src<TAB>dst<TAB>weight` with weights in [0, 1].
    #[arg(long)]
    edges: PathBuf,
    /// Largest K tried (K ranges over 2..=kmax).
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(2..))]
    kmax: u64,
    /// Seed for k-means initialization.
    #[arg(long, default_value_t = netsil_core::suites::DEFAULT_MASTER_SEED)]
    seed: u64,
    /// Directory for assignment.csv, curve.csv and cluster.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write silhouette.json with per-node scores for the chosen K (requires --out).
    #[arg(long, requires = "out")]
    emit_silhouette: bool,
}

#[derive(Args, Debug)]
struct AirlineArgs {
    /// Reachability arc list: `src dst weight`, whitespace separated.
    #[arg(long)]
    edges: PathBuf,
    /// City metadata CSV with columns id,name,lat,lon,population.
    #[arg(long)]
    meta: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Largest K tried.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(2..))]
    kmax: u64,
    /// Seed for k-means initialization.
    #[arg(long, default_value_t = netsil_core::airline::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct RingsArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Seed for point generation and k-means.
    #[arg(long, default_value_t = netsil_core::suites::DEFAULT_MASTER_SEED)]
    seed: u64,
    /// Largest K tried.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(2..))]
    kmax: u64,
}

#[derive(Args, Debug)]
struct SuitesArgs {
    /// Write every built-in suite as `<name>.json` into this directory.
    #[arg(long)]
    write: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Cluster(a) => commands::cluster(a),
        Command::Airline(a) => commands::airline(a),
        Command::Rings(a) => commands::rings(a),
        Command::Suites(a) => commands::suites(a),
        Command::Version => commands::version(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
