mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "dtsynth",
    version,
    about = "Predict how well dynamic texture videos can be synthesized"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Base seed; every random choice is derived from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// TOML configuration file; defaults apply for anything it omits.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one configuration value, e.g. `--set dictionary.codewords=64`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Where results are written.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pattern dictionary operations.
    #[command(subcommand)]
    Dict(DictCommand),
    /// Feature extraction and ingestion.
    #[command(subcommand)]
    Features(FeaturesCommand),
    /// Train the full prediction pipeline.
    Train(TrainArgs),
    /// Predict textureness, mode, synthesizability and method.
    Predict(PredictArgs),
    /// Find the most spatially synthesizable rectangle of a video.
    DetectRegion(DetectRegionArgs),
    /// Random-split evaluation, or the AP self-test.
    Evaluate(EvaluateArgs),
}

#[derive(Subcommand, Debug)]
enum DictCommand {
    /// Learn shape co-occurrence codebooks from videos.
    Learn(DictLearnArgs),
}

#[derive(Subcommand, Debug)]
enum FeaturesCommand {
    /// Compute descriptors for every video of a manifest.
    Extract(ExtractArgs),
    /// Validate and import precomputed external descriptors.
    Ingest(IngestArgs),
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("input").required(true).multiple(true))]
pub struct DictLearnArgs {
    #[command(flatten)]
    pub common: Common,
    /// Manifest whose videos are used.
    #[arg(long, group = "input")]
    pub manifest: Option<PathBuf>,
    /// Extra video (directory of frames, raw planar file or y4m); repeatable.
    #[arg(long, group = "input")]
    pub video: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub manifest: PathBuf,
    /// Pattern dictionary; needed for SCOPDT.
    #[arg(long)]
    pub dict: Option<PathBuf>,
    /// Kinds to compute (SCOPDT, LBPTOP, EXTERNAL); repeatable.
    #[arg(long = "kind", default_values_t = ["SCOPDT".to_string(), "LBPTOP".to_string()])]
    pub kinds: Vec<String>,
    /// Write binary feature files instead of text.
    #[arg(long)]
    pub binary: bool,
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[command(flatten)]
    pub common: Common,
    /// Feature file to import.
    #[arg(long)]
    pub input: PathBuf,
    /// Required descriptor length.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub manifest: PathBuf,
    /// Feature files; repeatable.
    #[arg(long = "features", required = true)]
    pub features: Vec<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub model: PathBuf,
    /// Feature files; repeatable.
    #[arg(long = "features", required = true)]
    pub features: Vec<PathBuf>,
    /// Predict the rows of this manifest; otherwise every id with an EXTERNAL descriptor.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Predict only these ids; repeatable.
    #[arg(long = "id", conflicts_with = "manifest")]
    pub ids: Vec<String>,
}

#[derive(Args, Debug)]
pub struct DetectRegionArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub model: PathBuf,
    /// Pattern dictionary used when the features were extracted.
    #[arg(long)]
    pub dict: Option<PathBuf>,
    #[arg(long)]
    pub video: PathBuf,
    /// Video format: image-directory, raw-planar or y4m.
    #[arg(long)]
    pub format: Option<String>,
    /// PGM mask (nonzero = candidate area) replacing the motion mask.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Number of candidate rectangles.
    #[arg(long)]
    pub count: Option<usize>,
    /// Include every scored candidate in the output.
    #[arg(long)]
    pub candidates: bool,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: Common,
    /// retrieval, mode, spatial-shdt, temporal-shdt, temporal-tdt,
    /// method-shdt, method-tdt, all or ap-selftest.
    #[arg(long)]
    pub task: String,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Feature files; repeatable.
    #[arg(long = "features")]
    pub features: Vec<PathBuf>,
    /// Number of random splits.
    #[arg(long)]
    pub splits: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Dict(DictCommand::Learn(a)) => commands::dict_learn(a),
        Command::Features(FeaturesCommand::Extract(a)) => commands::features_extract(a),
        Command::Features(FeaturesCommand::Ingest(a)) => commands::features_ingest(a),
        Command::Train(a) => commands::train(a),
        Command::Predict(a) => commands::predict(a),
        Command::DetectRegion(a) => commands::detect_region(a),
        Command::Evaluate(a) => commands::evaluate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
