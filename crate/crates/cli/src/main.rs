use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quatfill::{Error, SolverConfig};

mod batch;
mod commands;
mod report;

#[derive(Parser, Debug)]
#[command(name = "quatfill", version, about = "Color image completion with low-rank quaternion factorizations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recover the missing pixels of one image.
    Complete(CompleteArgs),
    /// Exact-recovery experiment on a random low-rank quaternion matrix.
    Synth(SynthArgs),
    /// Compare two images (RSE, PSNR, SSIM, FSIM).
    Metrics(MetricsArgs),
    /// Export the quaternion singular values of an image as CSV.
    Spectrum(SpectrumArgs),
    /// Run `complete` over a directory of images and several sampling ratios.
    Batch(BatchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// Regularization weight.
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// Initial complex rank (even). Clamped to 2*min(M, N).
    #[arg(long, default_value_t = 50)]
    pub init_rank: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    /// Rank-gap statistic needed to cut the rank.
    #[arg(long, default_value_t = 10.0)]
    pub mu_threshold: f64,
    /// Solve on pixel values scaled to [0, 1] instead of [0, 255].
    #[arg(long)]
    pub unit_range: bool,
}

impl SolverArgs {
    /// Solver configuration for an `rows x cols` problem.
    pub fn config(&self, rows: usize, cols: usize, seed: u64) -> SolverConfig {
        let cap = 2 * rows.min(cols);
        let init_rank = if self.init_rank > cap {
            log::warn!("init rank {} exceeds 2*min(M, N); using {cap}", self.init_rank);
            cap
        } else {
            self.init_rank
        };
        SolverConfig {
            lambda: self.lambda,
            init_rank,
            tol: self.tol,
            max_iters: self.max_iters,
            mu_threshold: self.mu_threshold,
            seed,
            ..Default::default()
        }
    }
}

#[derive(Args, Debug)]
pub struct CompleteArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Recovered image.
    #[arg(long)]
    pub output: PathBuf,
    /// JSON report. Printed to stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Zero-filled observed image. Defaults to `<output stem>_observed.png`.
    #[arg(long)]
    pub observed: Option<PathBuf>,
    /// Use this mask instead of sampling one.
    #[arg(long, conflicts_with = "sr")]
    pub mask_in: Option<PathBuf>,
    /// Where to write the mask. Defaults to `<output stem>_mask.txt`.
    #[arg(long)]
    pub mask_out: Option<PathBuf>,
    /// Sampling ratio.
    #[arg(long)]
    pub sr: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    /// Quaternion rank of the ground truth.
    #[arg(long)]
    pub rank: usize,
    #[arg(long)]
    pub sr: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report file. Printed to stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub csv: PathBuf,
    /// Values at or below `tol * sigma_1` are omitted.
    #[arg(long, default_value_t = quatfill::DEFAULT_RANK_TOL)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct BatchArgs {
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub sr_list: Vec<f64>,
    #[arg(long)]
    pub csv: PathBuf,
    /// Master seed; per-run seeds are derived from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write recovered images here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads (default: one per core).
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Image(_) | Error::Input(_) => 2,
        Error::Config(_) => 3,
        Error::Dimension(_) => 4,
        Error::Numerical(_) => 5,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };

    let result = match cli.command {
        Command::Complete(args) => commands::complete(&args),
        Command::Synth(args) => commands::synth(&args),
        Command::Metrics(args) => commands::metrics(&args),
        Command::Spectrum(args) => commands::spectrum(&args),
        Command::Batch(args) => batch::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
