//! Command-line experiments: scree and reconstruction curves, per-digit
//! dimension tables, width and λ sweeps, and rolling-window time series.
//!
//! Every command writes its main output to `--out` and a JSON
//! [`report::RunReport`] next to it at `<out>.report.json`.

pub mod commands;
pub mod estimate;
pub mod report;
pub mod seeds;

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dimest::data::Regime;
use dimest::Result;

pub use estimate::{Method, OptimizerArg, ShareArg};
pub use report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "dimest", version, about = "Intrinsic dimension estimation by PCA, Isomap and sparse autoencoders")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized variance per principal component of one digit subset (CSV).
    Scree(ScreeArgs),
    /// Relative PCA reconstruction error against the number of components (CSV).
    Recon(ReconArgs),
    /// Mean dimension per digit over repeated random subsets (CSV).
    DeMnist(DeMnistArgs),
    /// Mean dimension of one digit as the number of samples grows (CSV).
    WidthSweep(WidthSweepArgs),
    /// Singular value proxies and dimensions for several sparsity weights (JSON lines).
    LambdaSweep(LambdaSweepArgs),
    /// Dimension of each sliding window of a price table (JSON lines).
    DeTimeseries(DeTimeseriesArgs),
    /// Synthetic factor-model price table with regime switches (CSV).
    SynthPrices(SynthPricesArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MnistArgs {
    /// IDX image file, optionally gzipped. `<path>.gz` is tried if `<path>` is absent.
    #[arg(long, default_value = "data/mnist/t10k-images-idx3-ubyte")]
    pub mnist_images: PathBuf,
    #[arg(long, default_value = "data/mnist/t10k-labels-idx1-ubyte")]
    pub mnist_labels: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RuleArgs {
    /// Share of the spectrum sum an entry needs to count.
    #[arg(long, default_value_t = 0.01)]
    pub threshold_gte: f64,
    /// Cumulative share the leading entries must reach.
    #[arg(long, default_value_t = 0.90)]
    pub threshold_cum: f64,
    /// Weigh the cumulative rule by raw values or by their squares.
    #[arg(long, value_enum, default_value_t = ShareArg::Raw)]
    pub cum_share: ShareArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AeArgs {
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    /// Total optimizer updates per training run; overrides --epochs so that
    /// batches of different sizes get the same training effort.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub learning_rate: f64,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    pub optimizer: OptimizerArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScreeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mnist: MnistArgs,
    #[arg(long, default_value_t = 0)]
    pub digit: u8,
    #[arg(long, visible_alias = "width", default_value_t = 60)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Subtract column means before the SVD.
    #[arg(long)]
    pub center: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReconArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mnist: MnistArgs,
    #[arg(long, default_value_t = 0)]
    pub digit: u8,
    #[arg(long, visible_alias = "width", default_value_t = 60)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub center: bool,
    /// Component counts to evaluate; all of 1..=rank when omitted.
    #[arg(long, value_delimiter = ',')]
    pub ks: Vec<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DeMnistArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mnist: MnistArgs,
    #[arg(long, value_enum, default_value_t = Method::Pca)]
    pub method: Method,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4,5,6,7,8,9")]
    pub digits: Vec<u8>,
    #[arg(long, visible_alias = "width", default_value_t = 60)]
    pub samples: usize,
    #[arg(long, default_value_t = 50)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Isomap neighbor count.
    #[arg(long, default_value_t = 10)]
    pub neighbors: usize,
    #[arg(long)]
    pub center: bool,
    /// Sparsity weight of the autoencoder.
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    /// Summarize the autoencoder code of a disjoint batch instead of the training batch.
    #[arg(long)]
    pub holdout: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub rules: RuleArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub ae: AeArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WidthSweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mnist: MnistArgs,
    #[arg(long, value_enum, default_value_t = Method::Ae)]
    pub method: Method,
    #[arg(long, default_value_t = 0)]
    pub digit: u8,
    #[arg(long, value_delimiter = ',', default_value = "2,10,30,60,90")]
    pub widths: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub neighbors: usize,
    #[arg(long)]
    pub center: bool,
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    #[arg(long)]
    pub holdout: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub rules: RuleArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub ae: AeArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LambdaSweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mnist: MnistArgs,
    /// Use the last window of this price table instead of a digit subset.
    #[arg(long)]
    pub prices: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub digit: u8,
    #[arg(long, default_value_t = 60)]
    pub samples: usize,
    #[arg(long, visible_alias = "width", default_value_t = 60)]
    pub window: usize,
    #[arg(long, value_delimiter = ',', default_value = "0,0.01,0.1,1")]
    pub lambdas: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub rules: RuleArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub ae: AeArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DeTimeseriesArgs {
    #[arg(long)]
    pub prices: PathBuf,
    #[arg(long, visible_alias = "width", default_value_t = 60)]
    pub window: usize,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Comma-separated estimators.
    #[arg(long = "method", value_enum, value_delimiter = ',', default_value = "pca")]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub neighbors: usize,
    #[arg(long)]
    pub center: bool,
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub rules: RuleArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub ae: AeArgs,
    #[arg(long)]
    pub out: PathBuf,
}

/// `days:factors`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegimeArg {
    pub days: usize,
    pub factors: usize,
}

impl FromStr for RegimeArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (d, f) = s.split_once(':').ok_or_else(|| format!("expected days:factors, got {s:?}"))?;
        Ok(RegimeArg {
            days: d.trim().parse().map_err(|e| format!("days in {s:?}: {e}"))?,
            factors: f.trim().parse().map_err(|e| format!("factors in {s:?}: {e}"))?,
        })
    }
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        Regime { days: r.days, factors: r.factors }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthPricesArgs {
    /// Consecutive `days:factors` segments.
    #[arg(long, value_delimiter = ',', default_value = "200:10,200:3")]
    pub regimes: Vec<RegimeArg>,
    #[arg(long, default_value_t = 50)]
    pub tickers: usize,
    /// Standard deviation of daily factor returns.
    #[arg(long, default_value_t = 0.01)]
    pub factor_std: f64,
    /// Standard deviation of idiosyncratic daily returns.
    #[arg(long, default_value_t = 1e-4)]
    pub noise_std: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Runs a parsed command. `argv` is recorded verbatim in the report.
pub fn run(cli: &Cli, argv: Vec<String>) -> Result<RunReport> {
    match &cli.command {
        Command::Scree(a) => commands::cmd_pca_scree(a, argv),
        Command::Recon(a) => commands::cmd_recon_curve(a, argv),
        Command::DeMnist(a) => commands::cmd_de_mnist(a, argv),
        Command::WidthSweep(a) => commands::cmd_width_sweep(a, argv),
        Command::LambdaSweep(a) => commands::cmd_lambda_sweep(a, argv),
        Command::DeTimeseries(a) => commands::cmd_de_timeseries(a, argv),
        Command::SynthPrices(a) => commands::cmd_synth_prices(a, argv),
    }
}

/// Parses `argv` (including the program name) and runs it.
pub fn run_args<I, T>(argv: I) -> std::result::Result<RunReport, String>
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&argv).map_err(|e| e.to_string())?;
    run(&cli, argv).map_err(|e| e.to_string())
}
