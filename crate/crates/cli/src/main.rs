//! `zopt` command-line driver.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit statuses.
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "zopt", version, about = "Grassmannian constellations on G(2,1) via the Bloch sphere")]
pub struct Cli {
    /// Worker threads for simulations and optimizers (0 = all cores).
    #[arg(long, global = true, env = "ZOPT_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a constellation and write it as JSON with a report sidecar.
    Construct(ConstructArgs),
    /// Tabulate minimum distances of constellation files against the bound.
    Evaluate(EvaluateArgs),
    /// Tabulate the upper bound on the minimum chordal distance.
    Bound(BoundArgs),
    /// Monte Carlo symbol error rate over an SNR grid.
    Simulate(SimulateArgs),
    /// Detector operation counters on a common trial stream.
    Bench(BenchArgs),
    /// Detect received blocks read from CSV.
    Detect(DetectArgs),
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Run configuration JSON; explicit flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the effective run configuration to this path.
    #[arg(long)]
    pub save_config: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    /// s-opt, z-opt, man-opt, exp-map, cube-split or grass-lattice.
    #[arg(long)]
    pub method: Option<String>,
    /// Bits per symbol (C = 2^B). For grass-lattice, B = 2 B_r.
    #[arg(long, short = 'b')]
    pub bits: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Point set for s-opt ("x y z" per line).
    #[arg(long)]
    pub packing_file: Option<PathBuf>,
    /// Grid margin for grass-lattice, in (0, 0.5).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Report sidecar path (defaults to <out>.report.json).
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Constellation JSON files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// Smallest point count (>= 3).
    #[arg(long, default_value_t = 3)]
    pub from: usize,
    /// Largest point count.
    #[arg(long, default_value_t = 64)]
    pub to: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct SimArgs {
    /// Constellation JSON file.
    #[arg(long, short)]
    pub constellation: Option<PathBuf>,
    /// Comma-separated SNR grid in dB (SNR = 1 / noise variance).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub snr: Option<Vec<f64>>,
    /// Trials per SNR point.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: Option<u64>,
    /// Receive antennas.
    #[arg(long, short = 'n', value_parser = clap::value_parser!(u64).range(1..))]
    pub antennas: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// glrt, sopt or zopt.
    #[arg(long, short)]
    pub detector: Option<String>,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    pub format: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub sim: SimArgs,
    /// Comma-separated detectors.
    #[arg(long, value_delimiter = ',')]
    pub detectors: Option<Vec<String>>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    /// Constellation JSON file.
    #[arg(long, short)]
    pub constellation: PathBuf,
    /// glrt, sopt or zopt.
    #[arg(long, short, default_value = "glrt")]
    pub detector: String,
    /// CSV with columns trial,col,y0_re,y0_im,y1_re,y1_im.
    #[arg(long, short)]
    pub input: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Ignored if a pool already exists; the default then stays in place.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
