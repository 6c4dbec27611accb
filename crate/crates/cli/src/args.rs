use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "nowcast", version, about = "Nowcast disaster damage from geotagged message activity")]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse input files and report rejected rows.
    Validate(ValidateArgs),
    /// Assign messages to regions.
    Join(JoinArgs),
    /// Per-region activity summaries.
    Summarize(SummarizeArgs),
    /// Rank keywords by how strongly activity falls with distance to the track.
    RankKeywords(RankArgs),
    /// Correlate activity and sentiment with per-capita damage.
    Correlate(CorrelateArgs),
    /// Daily correlation series.
    Series(SeriesArgs),
    /// Rank regions by normalized activity.
    Nowcast(NowcastArgs),
    /// Generate a synthetic input bundle.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct InputArgs {
    #[arg(long)]
    pub messages: Option<PathBuf>,
    #[arg(long)]
    pub regions: Option<PathBuf>,
    #[arg(long)]
    pub population: Option<PathBuf>,
    #[arg(long)]
    pub damage: Option<PathBuf>,
    #[arg(long)]
    pub track: Option<PathBuf>,
    /// Place-name table used to geocode messages without coordinates.
    #[arg(long)]
    pub gazetteer: Option<PathBuf>,
    /// Region level to use when the boundary file mixes levels.
    #[arg(long)]
    pub level: Option<String>,
    /// Spatial index cell size in degrees.
    #[arg(long, default_value_t = nowcast::geo::DEFAULT_CELL_DEG)]
    pub cell_size: f64,
    /// Collection period used to count each region's users.
    #[arg(long, default_value = "2012-10-20..2012-11-12")]
    pub period: String,
}

#[derive(Debug, Args, Clone, Default)]
pub struct SelectionArgs {
    /// `all`, or a comma-separated keyword pool (default: sandy,hurricane,storm,power,flooding).
    #[arg(long)]
    pub keywords: Option<String>,
    /// Also report each keyword of the pool separately.
    #[arg(long)]
    pub per_keyword: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum NormArg {
    PerCapita,
    PerPeriodUser,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum TransformArg {
    Raw,
    Log10,
    #[default]
    Both,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
}

#[derive(Debug, Args)]
pub struct JoinArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// Analysis window; defaults to the collection period.
    #[arg(long)]
    pub window: Option<String>,
    /// Split the window into bins of this many hours, measured from the epoch.
    #[arg(long)]
    pub bin_hours: Option<i64>,
    #[arg(long, default_value = "2012-10-30T00:00:00Z")]
    pub epoch: String,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    /// Comma-separated city ids; defaults to regions east of 90°W.
    #[arg(long)]
    pub cities: Option<String>,
    /// Span of the daily heatmap, in days.
    #[arg(long, default_value = "2012-10-22..2012-11-11")]
    pub span: String,
    #[arg(long, default_value = "2012-10-30T00:00:00Z")]
    pub epoch: String,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[arg(long, default_value = "2012-10-31..2012-11-12")]
    pub window: String,
    #[arg(long, value_enum, default_value_t)]
    pub normalization: NormArg,
    #[arg(long, value_enum, default_value_t)]
    pub transform: TransformArg,
    /// Count only original messages on the activity side.
    #[arg(long)]
    pub original_only: bool,
    /// Skip the sentiment cells.
    #[arg(long)]
    pub no_sentiment: bool,
    /// Use the embedded county table instead of input files.
    #[arg(long)]
    pub fixture: bool,
    /// Also write overlay.geojson.
    #[arg(long)]
    pub overlay: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// Days covered, inclusive.
    #[arg(long, default_value = "2012-10-22..2012-11-11")]
    pub span: String,
    #[arg(long, default_value = "2012-10-30T00:00:00Z")]
    pub epoch: String,
    #[arg(long, default_value_t = 24)]
    pub bin_hours: i64,
    #[arg(long, value_enum, default_value_t = NormArg::PerCapita)]
    pub normalization: NormArg,
    #[arg(long, default_value = "ex_post")]
    pub damage_source: String,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct NowcastArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[arg(long, default_value = "2012-10-31..2012-11-12")]
    pub window: String,
    #[arg(long, value_enum, default_value_t = NormArg::PerCapita)]
    pub normalization: NormArg,
    /// Use the embedded county table instead of input files.
    #[arg(long)]
    pub fixture: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Master seed (default 0, or the configuration's).
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON configuration; command-line values override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub regions: Option<usize>,
    #[arg(long)]
    pub media_burst: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value = "sim")]
    pub out: PathBuf,
}
