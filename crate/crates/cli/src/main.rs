//! `svinv`: model generation, simulation, noise, splits, FWI, evaluation
//! and exports over flat-binary dataset directories.

mod commands;
mod config;
mod error;
mod export;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::PipelineConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "svinv", version, about = "Velocity-inversion benchmark pipeline")]
struct Cli {
    /// TOML pipeline configuration; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads [default: all cores]. Outputs do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a model-only dataset with every (layers, category) subgroup.
    Generate(GenerateArgs),
    /// Simulate shot gathers for every model of a dataset.
    Simulate(SimulateArgs),
    /// Add coherent and stochastic noise to a simulated dataset.
    AddNoise(AddNoiseArgs),
    /// Draw the test set and nested training levels.
    Split(SplitArgs),
    /// Multiscale FWI of one sample from a smoothed start.
    Fwi(FwiArgs),
    /// Score predicted models against targets.
    Evaluate(EvaluateArgs),
    /// Export a velocity-depth profile (CSV) and optionally the model (PGM).
    ExportProfile(ExportProfileArgs),
    /// Export one shot gather as CSV and PGM.
    ExportGather(ExportGatherArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Layer-count range, `lo..hi` inclusive or a single count [default: 4..8].
    #[arg(long)]
    pub layers: Option<String>,
    /// Models per subgroup [default: 1].
    #[arg(long)]
    pub per_subgroup: Option<usize>,
    /// Comma-separated categories [default: layered,fault,salt].
    #[arg(long, value_delimiter = ',')]
    pub categories: Option<Vec<String>>,
    /// Suite seed [fallback: config, then SVINV_SEED, then 0].
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Model dataset directory.
    #[arg(long)]
    pub models: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Time step (s) [default: 0.001].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Grid spacing (m) [default: 7].
    #[arg(long)]
    pub dx: Option<f64>,
    /// Time samples per trace [default: 1000].
    #[arg(long)]
    pub nt: Option<usize>,
    /// Ricker dominant frequency (Hz); also sets the peak delay to 1.5/f [default: 20].
    #[arg(long)]
    pub freq: Option<f64>,
    /// Laplacian stencil order, 2 or 4 [default: 2].
    #[arg(long)]
    pub order: Option<u8>,
}

#[derive(Debug, Args)]
pub struct AddNoiseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Noise seed [fallback: config, then SVINV_SEED, then 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Lowest noise level relative to the clean max-abs [default: 0.05].
    #[arg(long)]
    pub mix_low: Option<f64>,
    /// Highest noise level relative to the clean max-abs [default: 0.20].
    #[arg(long)]
    pub mix_high: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Test models per subgroup [default: 800].
    #[arg(long)]
    pub test_per_subgroup: Option<usize>,
    /// Training models per subgroup for each level [default: 50,100,200,300,400].
    #[arg(long, value_delimiter = ',')]
    pub train_sizes: Option<Vec<usize>>,
    /// Draw each training level independently instead of nesting them.
    #[arg(long)]
    pub no_nest: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output JSON file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FwiArgs {
    /// Simulated dataset holding the observed data and true models.
    #[arg(long)]
    pub obs: PathBuf,
    #[arg(long)]
    pub model_index: usize,
    /// Gaussian smoothing of the starting model (cells) [default: 5].
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Low-pass stage cutoffs (Hz) [default: 10,15,20,25,30].
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<f64>>,
    /// Total iterations, split evenly across stages [default: 50].
    #[arg(long)]
    pub iters: Option<usize>,
    /// Column for the exported profile [default: 50].
    #[arg(long)]
    pub profile_column: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    /// Output JSON report.
    #[arg(long)]
    pub report: PathBuf,
    /// Clamp predictions to the normalization range instead of failing.
    #[arg(long)]
    pub clamp: bool,
}

#[derive(Debug, Args)]
pub struct ExportProfileArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Sample index.
    #[arg(long)]
    pub model: usize,
    /// Model column [default: 50].
    #[arg(long)]
    pub column: Option<usize>,
    /// Also write the model as a grayscale PGM.
    #[arg(long)]
    pub pgm: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportGatherArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Sample index.
    #[arg(long)]
    pub sample: usize,
    /// Shot index.
    #[arg(long, default_value_t = 0)]
    pub shot: usize,
    /// Display clip as a fraction of the gather's max-abs.
    #[arg(long, default_value_t = 0.1)]
    pub clip: f32,
    #[arg(long)]
    pub out: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::validation("config", "--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::runtime("threads", e.to_string()))?;
    }
    let cfg = PipelineConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Generate(a) => commands::generate(cfg, a),
        Command::Simulate(a) => commands::simulate(cfg, a),
        Command::AddNoise(a) => commands::add_noise(cfg, a),
        Command::Split(a) => commands::split(cfg, a),
        Command::Fwi(a) => commands::fwi(cfg, a),
        Command::Evaluate(a) => commands::evaluate(cfg, a),
        Command::ExportProfile(a) => commands::export_profile(cfg, a),
        Command::ExportGather(a) => commands::export_gather(cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code as u8)
        }
    }
}
