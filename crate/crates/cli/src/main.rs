//! `wmark`: embed, extract, attack, and benchmark block-DCT + PCA
//! watermarks in grayscale PGM images.
//!
//! Exit codes: 0 success, 1 evaluation completed with failed rows,
//! 2 usage/format errors, 3 math-domain errors (alpha = 0, undefined NC).

mod commands;
mod model_io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wmark_core::Error;

#[derive(Parser)]
#[command(
    name = "wmark",
    version,
    about = "Grayscale image watermarking in the PCA space of the block-DCT low band"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a binary logo into a cover image
    Embed(EmbedArgs),
    /// Recover the logo from a suspect image (requires the cover)
    Extract(ExtractArgs),
    /// Apply one or more attacks to an image
    Attack(AttackArgs),
    /// Embed once, run an attack grid, and report PSNR/NC per attack as CSV
    Evaluate(EvaluateArgs),
    /// Embed at several strengths and report PSNR and no-attack NC as CSV
    SweepAlpha(SweepAlphaArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PeakModeArg {
    /// Fixed peak of 255
    Fixed255,
    /// Peak taken from the cover's maximum intensity
    CoverMax,
}

impl From<PeakModeArg> for wmark_core::metrics::PeakMode {
    fn from(arg: PeakModeArg) -> Self {
        match arg {
            PeakModeArg::Fixed255 => Self::Fixed255,
            PeakModeArg::CoverMax => Self::CoverMax,
        }
    }
}

#[derive(Args)]
struct EmbedArgs {
    /// Cover image (PGM), dimensions 8x the watermark's
    #[arg(long)]
    cover: PathBuf,
    /// Binary logo (PBM, or PGM with nonzero = 1)
    #[arg(long)]
    wm: PathBuf,
    /// Output watermarked image (PGM)
    #[arg(long)]
    out: PathBuf,
    /// Embedding strength
    #[arg(long, default_value_t = wmark_core::DEFAULT_ALPHA)]
    alpha: f64,
    /// Comma-separated zig-zag ranks forming the band (default 1,2,3,4,5,6)
    #[arg(long)]
    band_indices: Option<String>,
    /// Save the cover-fitted PCA model to this path
    #[arg(long)]
    save_model: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fixed255")]
    peak_mode: PeakModeArg,
}

#[derive(Args)]
struct ExtractArgs {
    /// Original cover image (PGM); detection is non-blind
    #[arg(long)]
    cover: PathBuf,
    /// Possibly-attacked watermarked image (PGM)
    #[arg(long)]
    suspect: PathBuf,
    /// Output recovered logo (.pbm for bitmap, anything else as PGM)
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = wmark_core::DEFAULT_ALPHA)]
    alpha: f64,
    /// Reference logo; when given, NC against it is printed
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
    #[arg(long)]
    band_indices: Option<String>,
    /// Load the PCA model from a file instead of refitting on the cover
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    /// Input image (PGM)
    #[arg(long = "in")]
    input: PathBuf,
    /// Attack spec, e.g. jpeg:q=50, gauss-noise:v=0.01,seed=7, median:n=3,
    /// crop:x=128,y=128,w=256,h=256; repeatable
    #[arg(long, required = true)]
    spec: Vec<String>,
    /// Output file (single spec) or directory (several specs)
    #[arg(long)]
    out: PathBuf,
    /// Seed for stochastic attacks (falls back to $WMARK_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridArg {
    /// The built-in 12-attack benchmark grid
    Standard,
    /// No built-in grid; only --spec rows run
    None,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    cover: PathBuf,
    #[arg(long)]
    wm: PathBuf,
    #[arg(long, default_value_t = wmark_core::DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long)]
    band_indices: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Built-in attack grid to run before any --spec rows
    #[arg(long, value_enum, default_value = "standard")]
    grid: GridArg,
    /// Extra attack rows; repeatable
    #[arg(long)]
    spec: Vec<String>,
    /// Comma-separated JPEG qualities; replaces the grid with that sweep
    #[arg(long)]
    jpeg_sweep: Option<String>,
    #[arg(long, value_enum, default_value = "fixed255")]
    peak_mode: PeakModeArg,
}

#[derive(Args)]
struct SweepAlphaArgs {
    #[arg(long)]
    cover: PathBuf,
    #[arg(long)]
    wm: PathBuf,
    /// Comma-separated strengths, e.g. 10,15,20,30,40
    #[arg(long)]
    alphas: String,
    #[arg(long)]
    band_indices: Option<String>,
    /// Report CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fixed255")]
    peak_mode: PeakModeArg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Embed(args) => commands::embed(args),
        Command::Extract(args) => commands::extract(args),
        Command::Attack(args) => commands::attack(args),
        Command::Evaluate(args) => commands::evaluate(args),
        Command::SweepAlpha(args) => commands::sweep_alpha(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::ZeroAlpha | Error::UndefinedNc => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
