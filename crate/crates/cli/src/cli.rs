use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use inh_fr3::{ChannelState, FrequencyBand};

#[derive(Debug, Parser)]
#[command(name = "inh-fr3", version, about = "Indoor-office FR3 large-scale channel model")]
pub struct Cli {
    /// TOML file mirroring the command-line flags; flags win on conflict.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// TOML file with `[[table]]` entries replacing built-in coefficients.
    #[arg(long, global = true, value_name = "PATH")]
    pub table_override: Option<PathBuf>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the built-in parameter tables and correlation matrices as CSV.
    Tables(TablesArgs),
    /// Simulate drops and write one record per (drop, band).
    Generate(GenerateArgs),
    /// Estimate model coefficients from a record file.
    Fit(FitArgs),
    /// Audit the tables and run the generate/fit round trip.
    Validate(ValidateArgs),
    /// Emit plot-ready `series,x,y` data from a record file.
    Plotdata(PlotdataArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Params,
    Corr,
    Interfreq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShadowArg {
    /// Constant sigma from the table.
    Table,
    /// 6.5 log10(d) dB, floored at --sigma-min.
    Distance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum PlotKind {
    PlVsD,
    SfQq,
    DsQq,
    AsaQq,
    ZsaQq,
    SpreadVsD,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[arg(long)]
    pub band: Option<FrequencyBand>,
    #[arg(long)]
    pub state: Option<ChannelState>,
    #[arg(long, value_enum)]
    pub kind: Option<TableKind>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Comma-separated band list, e.g. 6.9,8.3.
    #[arg(long, value_delimiter = ',')]
    pub bands: Option<Vec<FrequencyBand>>,
    #[arg(long)]
    pub state: Option<ChannelState>,
    #[arg(long)]
    pub drops: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub dmin: Option<f64>,
    #[arg(long)]
    pub dmax: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Draw ZSA from a single log-normal instead of the two-mode mixture.
    #[arg(long)]
    pub no_zsa_mixture: bool,
    /// Use the NLOS fit alone instead of max(LOS, NLOS).
    #[arg(long)]
    pub no_two_slope: bool,
    #[arg(long, value_enum)]
    pub nlos_shadow: Option<ShadowArg>,
    /// Floor for the distance-scaled shadow sigma, dB.
    #[arg(long)]
    pub sigma_min: Option<f64>,
    /// Cross-band correlation of ASA and of ZSA.
    #[arg(long, allow_negative_numbers = true)]
    pub asa_zsa_corr: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Record file (CSV, or JSON-lines with optional raw payloads).
    pub input: Option<PathBuf>,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Round-trip sample size per (band, state).
    #[arg(long)]
    pub drops: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<PlotKind>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long)]
    pub band: Option<FrequencyBand>,
    #[arg(long)]
    pub state: Option<ChannelState>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}
