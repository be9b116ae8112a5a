//! `crvr`: generate block networks, compute CRVR persistence diagrams and
//! compare the topological label with Louvain and WSBM baselines.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crvr_core::netgen::Structure;
use crvr_core::network::NetworkFormat;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "crvr", version, about = "Topological block-structure detection for weighted networks")]
pub struct Cli {
    /// `key = value` file with defaults for the subcommand's flags; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a planted block network or a weighted Erdős–Rényi network.
    #[command(args_override_self = true)]
    Generate(GenerateArgs),
    /// Persistence barcode, diagram, features and structure label of a network.
    #[command(args_override_self = true)]
    Analyze(AnalyzeArgs),
    /// Weighted Louvain partition.
    #[command(args_override_self = true)]
    Louvain(LouvainArgs),
    /// Variational weighted stochastic block model fit.
    #[command(args_override_self = true)]
    Wsbm(WsbmCmdArgs),
    /// Analyze, Louvain and WSBM on one network, in one report.
    #[command(args_override_self = true)]
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Args)]
struct SeedArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run seeds `seed .. seed + N` concurrently; outputs are named by seed.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    repeat: u64,
}

#[derive(Debug, Clone, Args)]
struct InputArgs {
    /// Network file.
    #[arg(short, long, value_name = "PATH")]
    input: PathBuf,
    /// `edgelist` or `dense`.
    #[arg(long, default_value = "edgelist", value_parser = parse_format)]
    format: NetworkFormat,
}

#[derive(Debug, Clone, Args)]
struct TopologyArgs {
    /// Weights at or below zeta are cropped to distance 1/zeta.
    #[arg(long, default_value_t = 0.1, value_parser = positive)]
    zeta: f64,
    /// Reference threshold for diagram features.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    tau: f64,
    /// Largest simplex dimension; homology is reported below it.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..=8))]
    max_dim: u64,
    /// Also write zero-length intervals to barcode.csv.
    #[arg(long)]
    keep_zero_length: bool,
    /// Write deaths at the cap 1/zeta as infinite in barcode.csv and diagram.svg.
    #[arg(long)]
    cap_as_infinite: bool,
}

#[derive(Debug, Clone, Args)]
struct WsbmArgs {
    /// Number of blocks.
    #[arg(short, long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    k: u64,
    /// Weight of the edge-existence part of the likelihood.
    #[arg(long, default_value_t = 0.5, value_parser = unit)]
    alpha: f64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    restarts: u64,
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    max_iter: u64,
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    tol: f64,
    /// Weights above this count as edges.
    #[arg(long, default_value_t = 0.1, value_parser = nonnegative)]
    floor: f64,
    /// Tempered sweeps before the recorded iterations (0 disables).
    #[arg(long, default_value_t = 10)]
    warmup_steps: usize,
}

#[derive(Debug, Clone, Args)]
struct GenerateArgs {
    /// assortative, disassortative, core-periphery or ordered.
    #[arg(long, value_parser = parse_structure, required_unless_present = "er", conflicts_with = "er")]
    structure: Option<Structure>,
    /// Weighted Erdős–Rényi instead of a block network.
    #[arg(long)]
    er: bool,
    /// Number of blocks.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    groups: u64,
    /// Vertices per block.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    size: u64,
    /// Vertex count of an Erdős–Rényi network.
    #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Block networks: keep probability of strong pairs (noisy variant).
    /// Erdős–Rényi: edge probability (default 0.5).
    #[arg(long, value_parser = unit)]
    p: Option<f64>,
    /// Keep probability of weak pairs (noisy variant).
    #[arg(long, value_parser = unit)]
    q: Option<f64>,
    #[arg(short, long, default_value = "network.txt", value_name = "PATH")]
    out: PathBuf,
    #[arg(long, default_value = "edgelist", value_parser = parse_format)]
    format: NetworkFormat,
    #[command(flatten)]
    seed: SeedArgs,
}

#[derive(Debug, Clone, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["input", "filtration_in"]))]
struct AnalyzeArgs {
    /// Network file.
    #[arg(short, long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Read a filtration (`value dim v0 v1 ...` lines) instead of a network.
    #[arg(long, value_name = "PATH")]
    filtration_in: Option<PathBuf>,
    #[arg(long, default_value = "edgelist", value_parser = parse_format)]
    format: NetworkFormat,
    #[command(flatten)]
    topology: TopologyArgs,
    /// Seed recorded in the output metadata.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(short, long, default_value = ".", value_name = "DIR")]
    out: PathBuf,
}

#[derive(Debug, Clone, Args)]
struct LouvainArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    seed: SeedArgs,
    /// Partition JSON; printed to stdout when omitted.
    #[arg(short, long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Planted labels to score against (JSON array, JSON sidecar or whitespace list).
    #[arg(long, value_name = "PATH")]
    labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct WsbmCmdArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    wsbm: WsbmArgs,
    #[command(flatten)]
    seed: SeedArgs,
    /// Fit JSON; printed to stdout when omitted.
    #[arg(short, long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    labels: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    topology: TopologyArgs,
    #[command(flatten)]
    wsbm: WsbmArgs,
    #[command(flatten)]
    seed: SeedArgs,
    /// Output directory.
    #[arg(short, long, default_value = ".", value_name = "DIR")]
    out: PathBuf,
    #[arg(long, value_name = "PATH")]
    labels: Option<PathBuf>,
}

fn parse_format(s: &str) -> Result<NetworkFormat, String> {
    s.parse().map_err(|e: crvr_core::Error| e.to_string())
}

fn parse_structure(s: &str) -> Result<Structure, String> {
    s.parse().map_err(|e: crvr_core::Error| e.to_string())
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn nonnegative(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be nonnegative, got {v}"))
    }
}

fn unit(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("must lie in [0, 1], got {v}"))
    }
}

fn run() -> Result<(), CliError> {
    let args = config::expand_args(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Louvain(a) => commands::louvain(&a),
        Command::Wsbm(a) => commands::wsbm(&a),
        Command::Compare(a) => commands::compare(&a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("crvr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
