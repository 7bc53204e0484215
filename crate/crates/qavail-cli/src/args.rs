use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "qavail",
    version,
    about = "Seeded amplitude amplification, estimation and counting"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schedule and run amplified retrievals.
    Amplify(AmplifyArgs),
    /// Amplitude estimation with a Fourier register.
    Estimate(EstimateArgs),
    /// Count good items as N times the estimated amplitude.
    Count(EstimateArgs),
    /// Letter-position partitions of a word list.
    ScenarioLetter(LetterArgs),
    /// Two groups of names with different salience.
    ScenarioNames(NamesArgs),
    /// Invariant checks at small sizes.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Add wall-clock time under a separate `timing` key.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct SearchSpace {
    /// Number of items.
    #[arg(long)]
    pub n: usize,
    /// Comma-separated good item indices.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub good: Vec<usize>,
    /// Comma-separated guess weights, one per item (default uniform).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct AmplifyArgs {
    #[command(flatten)]
    pub space: SearchSpace,
    /// Override the scheduled iteration count.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub space: SearchSpace,
    /// Register size (default chosen from the guess-state amplitude).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Emit the exact outcome distribution.
    #[arg(long)]
    pub distribution: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct LetterArgs {
    /// Word list, one `word` or `word<TAB>frequency` per line (default bundled sample).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = 'r')]
    pub letter: char,
    #[arg(long, default_value_t = 4.0)]
    pub boost: f64,
    #[arg(long, default_value_t = 128)]
    pub m: usize,
    #[arg(long, default_value_t = 60)]
    pub budget: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long)]
    pub distribution: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct NamesArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [19usize, 20])]
    pub sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [2.0f64, 1.0], allow_negative_numbers = true)]
    pub factors: Vec<f64>,
    #[arg(long, default_value_t = 32)]
    pub m: usize,
    #[arg(long, default_value_t = 60)]
    pub budget: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub distribution: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Test hook: perturb the closed-form kernel so the equivalence check must fail.
    #[arg(long, hide = true)]
    pub inject_kernel_perturbation: bool,
}
