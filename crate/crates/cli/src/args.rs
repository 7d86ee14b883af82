use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spclust::fspc::{DEFAULT_MAX_GENERATIONS, DEFAULT_POP_SIZE, DEFAULT_STALL_GENERATIONS};
use spclust::spc::{DEFAULT_Q, DEFAULT_STEPS, DEFAULT_THETA};
use spclust::{Objective, TemperatureGrid};

#[derive(Debug, Parser)]
#[command(name = "spclust", version, about = "Super-paramagnetic clustering and maximum-likelihood f-SPC")]
pub struct Cli {
    /// Worker threads for the parallel stages (0 = all cores).
    #[arg(long, global = true, env = "SPCLUST_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic data set and its ground-truth labels.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Load a CSV and derive returns, scaled data or a correlation matrix.
    Preprocess(PreprocessArgs),
    /// Run a Swendsen-Wang temperature sweep.
    Spc(SpcArgs),
    /// Maximize the cluster likelihood of a correlation matrix with the genetic algorithm.
    Fspc(FspcArgs),
    /// Phase report, likelihood and ARI curves for a sweep.
    Validate(ValidateArgs),
    /// Free energy, entropy and susceptibility per temperature of a sweep.
    Analyze(AnalyzeArgs),
    /// Minimum spanning tree of a data set or correlation matrix.
    Mst(MstArgs),
}

#[derive(Debug, Args)]
pub struct SeedArg {
    #[arg(long, env = "SPCLUST_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GenerateOutput {
    /// Data CSV, `<kind>.csv` by default (`-` for stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Ground-truth label CSV, `<stem>_labels.csv` next to the data by default.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// Two concentric noisy rings.
    Circles {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        noise: f64,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: GenerateOutput,
    },
    /// Isotropic Gaussian blobs, one per standard deviation.
    Blobs {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        dims: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 1.0])]
        sigmas: Vec<f64>,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: GenerateOutput,
    },
}

/// Without either flag the first CSV line is a header when any of its cells is not a number.
#[derive(Debug, Args, Clone, Copy)]
pub struct HeaderArg {
    /// The CSV's first line is a header.
    #[arg(long, conflicts_with = "no_header")]
    pub header: bool,
    /// The CSV's first line is data.
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Args)]
pub struct CsvInput {
    /// Input CSV, or a matrix JSON envelope (`.json`).
    #[arg(long, short)]
    pub input: PathBuf,
    #[command(flatten)]
    pub header: HeaderArg,
    /// The CSV's first column holds row identifiers.
    #[arg(long)]
    pub row_labels: bool,
    /// Observations are stored as columns.
    #[arg(long)]
    pub transpose: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CorrelationChoice {
    /// Pearson correlation between rows (complete data only).
    Pearson,
    /// Pearson over the columns present in both rows.
    Overlap,
    /// One minus the Euclidean distance over its maximum.
    Similarity,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Denoise {
    None,
    Imn,
    Rmt,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[command(flatten)]
    pub input: CsvInput,
    /// Replace each row by its log returns along the columns.
    #[arg(long)]
    pub returns: bool,
    /// Min-max scale every column to [0, 1].
    #[arg(long)]
    pub scale: bool,
    /// Emit a correlation (or similarity) matrix instead of data.
    #[arg(long, value_enum)]
    pub correlation: Option<CorrelationChoice>,
    /// Emit a denoised correlation matrix.
    #[arg(long, value_enum, default_value_t = Denoise::None, conflicts_with = "correlation")]
    pub denoise: Denoise,
    #[arg(long, default_value_t = spclust::preprocess::DEFAULT_IMN_ITERS)]
    pub imn_iters: usize,
    #[arg(long, default_value_t = spclust::preprocess::DEFAULT_IMN_TOL)]
    pub imn_tol: f64,
    /// Keep only eigenvalues above the noise band.
    #[arg(long, alias = "upper-only")]
    pub rmt_upper_only: bool,
    /// Repair the correlation matrix to be positive definite.
    #[arg(long)]
    pub make_pd: bool,
    /// Output: `.csv` for data, JSON envelope otherwise (`-` for stdout).
    #[arg(long, short, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum DistanceChoice {
    /// Euclidean distance between data rows.
    Euclidean,
    /// `sqrt(2 (1 - rho))` from the Pearson correlation of the rows.
    Correlation,
}

#[derive(Debug, Args)]
pub struct SpcArgs {
    /// Data CSV, data or correlation JSON envelope, or a graph JSON written by `--graph-output`.
    #[arg(long, short)]
    pub input: PathBuf,
    #[command(flatten)]
    pub header: HeaderArg,
    #[arg(long)]
    pub row_labels: bool,
    #[arg(long)]
    pub transpose: bool,
    /// Distance for data input (correlation inputs always use `sqrt(2 (1 - rho))`).
    #[arg(long, value_enum, default_value_t = DistanceChoice::Euclidean)]
    pub distance: DistanceChoice,
    /// Neighbors for the mutual K-nearest-neighbor graph.
    #[arg(long, default_value_t = spclust::similarity::DEFAULT_K)]
    pub k: usize,
    /// Number of Potts states.
    #[arg(long, default_value_t = DEFAULT_Q)]
    pub q: u32,
    /// Temperature range `start:stop:step`.
    #[arg(long = "t", default_value = "0.005:0.25:0.005", value_parser = parse_grid)]
    pub grid: TemperatureGrid,
    /// Swendsen-Wang steps per temperature.
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    /// Discarded steps per temperature; a fifth of `--steps` by default.
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Spin-spin correlation threshold for cluster extraction.
    #[arg(long, default_value_t = DEFAULT_THETA)]
    pub theta: f64,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Include the full spin-spin correlation matrix of every temperature.
    #[arg(long)]
    pub dump_g: bool,
    /// Sweep JSON (`-` for stdout).
    #[arg(long, short, default_value = "-")]
    pub output: PathBuf,
    /// Also write the neighbor graph with its couplings.
    #[arg(long)]
    pub graph_output: Option<PathBuf>,
}

fn parse_grid(s: &str) -> Result<TemperatureGrid, String> {
    s.parse().map_err(|e: spclust::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct FspcArgs {
    /// Correlation JSON envelope.
    #[arg(long)]
    pub corr: PathBuf,
    #[arg(long, default_value_t = DEFAULT_POP_SIZE)]
    pub pop: usize,
    /// Stop after this many generations without improvement.
    #[arg(long, default_value_t = DEFAULT_STALL_GENERATIONS)]
    pub stall: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_GENERATIONS)]
    pub gens: usize,
    #[arg(long, default_value_t = Objective::Lc, value_parser = parse_objective)]
    pub objective: Objective,
    /// Reorder rows by nearest-neighbor chaining before the search.
    #[arg(long)]
    pub order_by_neighbors: bool,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Result JSON (`-` for stdout).
    #[arg(long, short, default_value = "-")]
    pub output: PathBuf,
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    s.parse().map_err(|e: spclust::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Sweep JSON written by `spc`.
    #[arg(long)]
    pub sweep: PathBuf,
    /// Correlation JSON envelope for the likelihood curve.
    #[arg(long)]
    pub corr: Option<PathBuf>,
    /// Reference partition: label CSV or an `fspc` result JSON.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Report JSON (`-` for stdout).
    #[arg(long, short, default_value = "-")]
    pub output: PathBuf,
    /// Also write the report as Markdown.
    #[arg(long)]
    pub markdown: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Sweep JSON written by `spc`.
    #[arg(long)]
    pub sweep: PathBuf,
    /// `.json` for JSON, CSV otherwise (`-` for CSV on stdout).
    #[arg(long, short, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum MstFormat {
    Dot,
    Json,
}

#[derive(Debug, Args)]
pub struct MstArgs {
    #[command(flatten)]
    pub input: CsvInput,
    #[arg(long, value_enum, default_value_t = MstFormat::Json)]
    pub format: MstFormat,
    #[arg(long, short, default_value = "-")]
    pub output: PathBuf,
}
