//! `qpuf-id`: protocol runs, attack games, bound evaluation and sweeps.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpuf_core::protocol::Protocol;

use config::ConfigArgs;

#[derive(Parser, Debug)]
#[command(name = "qpuf-id", version, about = "Quantum-PUF identification protocols: runs, attacks and analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Honest protocol runs with an aggregate summary.
    Run(RunArgs),
    /// Attack games with an empirical rate and the matching analytic value.
    Attack(AttackArgs),
    /// Closed-form bounds and sweep tables as CSV.
    Analyze(AnalyzeArgs),
    /// Exhaustive cver pass probabilities for small N.
    Oracle(OracleArgs),
    /// Re-runs the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(value_parser = parse_protocol)]
    pub protocol: Protocol,
    #[command(flatten)]
    pub cfg: ConfigArgs,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Write full transcripts of the first COUNT trials.
    #[arg(long, value_name = "COUNT", default_value_t = 0)]
    pub transcripts: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AttackerName {
    Honest,
    HaarResponder,
    ClassicalIndependent,
    ClassicalGlobal,
    SubspaceForger,
    QuantumCollective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TestName {
    Ideal,
    Swap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleName {
    AcceptMeansValid,
    AlwaysValid,
    CoinFlip,
    Threshold,
}

#[derive(Args, Debug)]
pub struct AttackArgs {
    #[arg(value_parser = parse_protocol)]
    pub protocol: Protocol,
    pub attacker: AttackerName,
    #[command(flatten)]
    pub cfg: ConfigArgs,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Per-bit zero probability of the independent guesser.
    #[arg(long, default_value_t = 0.75)]
    pub alpha: f64,
    /// Transit queries used for learning.
    #[arg(long = "d", default_value_t = 10)]
    pub learn: usize,
    #[arg(long, value_enum, default_value = "haar")]
    pub query_choice: QueryChoiceName,
    #[arg(long, value_enum, default_value = "bayes-optimal")]
    pub strategy: StrategyName,
    #[arg(long, value_enum, default_value = "ideal")]
    pub test: TestName,
    #[arg(long, value_enum, default_value = "accept-means-valid")]
    pub rule: RuleName,
    /// Minimum learned-span overlap for the threshold rule.
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value = "collective")]
    pub attack_mode: AttackModeName,
    /// Rounds of the shared-device distinguishing experiment.
    #[arg(long = "rounds", default_value_t = 10_000)]
    pub trap_rounds: usize,
    /// Play full lrv games for quantum-collective instead of the
    /// distinguishing experiment.
    #[arg(long)]
    pub game: bool,
    /// Also write one CSV row per trial.
    #[arg(long)]
    pub trials_csv: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QueryChoiceName {
    Haar,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyName {
    BayesOptimal,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AttackModeName {
    Collective,
    Coherent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Bounds,
    SweepFigure3,
    SweepFigure6,
    SweepFigure7,
    SweepFigure8,
    Resources,
    AvgUniformP,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Challenge counts, comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long = "Nmax")]
    pub n_max: Option<usize>,
    #[arg(long = "M")]
    pub m: Option<u32>,
    #[arg(long = "Mmax")]
    pub m_max: Option<u32>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Points on the epsilon grid.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleStrategyName {
    Global,
    Independent,
    FixedWeight,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, value_enum, default_value = "global")]
    pub strategy: OracleStrategyName,
    #[arg(long, default_value_t = 0.75)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub ones: usize,
    /// Also write `oracle.json` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    s.parse().map_err(|e: qpuf_core::Error| e.to_string())
}

/// Configuration problems exit with 2, everything else with 1.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Run(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Run(e)
    }
}

impl From<qpuf_core::Error> for CliError {
    fn from(e: qpuf_core::Error) -> Self {
        match e {
            qpuf_core::Error::InvalidConfig(m) => CliError::Config(m),
            other => CliError::Run(other.into()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(e.into())
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match commands::dispatch(cli.command, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(m)) => {
            eprintln!("error: invalid configuration: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
