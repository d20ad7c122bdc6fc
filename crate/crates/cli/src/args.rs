use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "fracld",
    version,
    about = "Large-deviation numerics for fractional Poisson processes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate E^gamma_{alpha,beta}(z), optionally in log scale.
    MlEval(MlEvalArgs),
    /// Probability mass function of the weighted Poisson or subordinated law.
    Pmf(PmfArgs),
    /// Draw holding times, counts or weighted Poisson variates.
    Sample(SampleArgs),
    /// Rate functions on a grid of x values.
    Rate(RateArgs),
    /// Normalized relative entropy against its large-t limit.
    Entropy(EntropyArgs),
    /// Tail profiles -(1/t) log P(N(t)/t >= x).
    LdpProfile(ProfileArgs),
    /// Chi-squared comparison of simulated counts with the subordinated pmf.
    CompareSubordinated(CompareArgs),
    /// Adjustment coefficient and importance-sampled ruin probabilities.
    Ruin(RuinArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Output file, `-` for stdout.
    #[arg(long, default_value = "-")]
    pub output: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args, Serialize)]
pub struct ProcessArgs {
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct MlEvalArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Comma-separated arguments.
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub z: Vec<f64>,
    /// Report log E instead of E.
    #[arg(long)]
    pub log: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PmfLaw {
    Weighted,
    Subordinated,
}

#[derive(Debug, Args, Serialize)]
pub struct PmfArgs {
    #[arg(long, value_enum, default_value_t = PmfLaw::Weighted)]
    pub law: PmfLaw,
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Largest k reported; defaults to the truncation horizon.
    #[arg(long)]
    pub k_max: Option<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    Holding,
    Count,
    Weighted,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value_t = SampleKind::Holding)]
    pub kind: SampleKind,
    #[command(flatten)]
    #[serde(flatten)]
    pub process: ProcessArgs,
    /// Horizon for counts and weighted Poisson draws.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_rep: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum RateKind {
    /// I^T, holding-time averages.
    #[value(name = "T")]
    T,
    /// I^M, counts of the renewal version.
    #[value(name = "M")]
    M,
    /// I^A, counts of the weighted Poisson version.
    #[value(name = "A")]
    A,
    /// Composition rate of the subordinated representation.
    #[value(name = "J")]
    J,
}

#[derive(Debug, Args, Serialize)]
pub struct RateArgs {
    #[arg(long, value_enum, ignore_case = true, default_value_t = RateKind::M)]
    pub kind: RateKind,
    #[command(flatten)]
    #[serde(flatten)]
    pub process: ProcessArgs,
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub x: Vec<f64>,
    /// Always conjugate numerically.
    #[arg(long)]
    pub numeric: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    #[arg(long)]
    pub lambda1: f64,
    #[arg(long)]
    pub lambda2: f64,
    #[arg(long, value_delimiter = ',', default_value = "10,20,40,80")]
    pub t: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileModel {
    /// Monte Carlo over renewal paths.
    Renewal,
    /// Exact tail sums of the weighted Poisson version.
    Weighted,
}

#[derive(Debug, Args, Serialize)]
pub struct ProfileArgs {
    #[arg(long, value_enum, default_value_t = ProfileModel::Renewal)]
    pub model: ProfileModel,
    #[command(flatten)]
    #[serde(flatten)]
    pub process: ProcessArgs,
    #[arg(long)]
    pub x: f64,
    #[arg(long, required = true, value_delimiter = ',')]
    pub t: Vec<f64>,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_rep: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_rep: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct RuinArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub process: ProcessArgs,
    /// Premium rate.
    #[arg(long)]
    pub c: f64,
    /// `exp:MU`, `gamma:SHAPE:RATE` or `det:M`.
    #[arg(long, default_value = "exp:1")]
    pub claims: String,
    /// Initial capital levels.
    #[arg(long, value_delimiter = ',', default_value = "5")]
    pub u: Vec<f64>,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_rep: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Steps of an untilted cross-check per replication; 0 disables it.
    #[arg(long, default_value_t = 0)]
    pub crude_horizon: u64,
    #[arg(long, default_value_t = fracld::ruin::DEFAULT_STEP_CAP)]
    pub step_cap: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
}
