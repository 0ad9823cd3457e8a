//! `pedrad` — pedestrian radar signature simulation pipeline.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure (every
//! block of the run failed to solve).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{AllBlocksFailed, AzimuthSweep};
use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "pedrad",
    about = "Simulate polarimetric radar signatures of walking humans",
    after_long_help = config::config_reference(),
    version
)]
struct Cli {
    /// Worker threads for ray tracing and per-block stages
    /// (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ray-trace the mesh sequence into a per-frame RCS table.
    Rcs {
        #[arg(long)]
        config: PathBuf,
        /// Bistatic sweep `start:stop:step` in degrees of the scattered
        /// azimuth for a single frame (writes rcs_bistatic.csv).
        #[arg(long, value_name = "START:STOP:STEP")]
        sweep_phi_s: Option<AzimuthSweep>,
        /// Frame index for the bistatic sweep.
        #[arg(long, default_value_t = 0)]
        frame: usize,
        /// Output path (default: <output_dir>/rcs.csv).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate per-block scatterer reflectivities from an RCS table.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        /// RCS table (default: <output_dir>/rcs.csv).
        #[arg(long)]
        rcs: Option<PathBuf>,
    },
    /// Synthesize block data cubes from a coefficient table.
    Synth {
        #[arg(long)]
        config: PathBuf,
        /// Coefficient table (default: <output_dir>/coefficients.csv).
        #[arg(long)]
        coefficients: Option<PathBuf>,
        /// Only synthesize this block index.
        #[arg(long)]
        block: Option<usize>,
    },
    /// Transform a cube file into a signature matrix.
    Signature {
        #[arg(long)]
        config: PathBuf,
        /// Cube file in the RDC1 binary format.
        #[arg(long)]
        cube: PathBuf,
        /// range_time | doppler_time | range_doppler.
        #[arg(long)]
        kind: String,
        /// 1-based CPI index for range_doppler.
        #[arg(long, default_value_t = 1)]
        cpi: usize,
        /// Output stem (default: cube file stem).
        #[arg(long)]
        out_stem: Option<String>,
    },
    /// Compare simulated block cubes against a measured cube.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Directory with simulated block_%04d.rdc cubes.
        #[arg(long)]
        sim_dir: PathBuf,
        /// Measured cube in the RDC1 binary format.
        #[arg(long)]
        measured: PathBuf,
    },
    /// Sweep stride/CPI-count candidates and rank them by residual.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// RCS table (default: <output_dir>/rcs.csv).
        #[arg(long)]
        rcs: Option<PathBuf>,
    },
    /// Run the full chain: trace, estimate, synthesize, transform, export.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        /// Optional measured cube; adds the comparison reports.
        #[arg(long)]
        measured: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| anyhow::anyhow!("cannot size the thread pool: {e}"))?;
    }
    match cli.command {
        Command::Rcs {
            config,
            sweep_phi_s,
            frame,
            out,
        } => commands::cmd_rcs(&RunConfig::load(&config)?, sweep_phi_s, frame, out),
        Command::Estimate { config, rcs } => {
            commands::cmd_estimate(&RunConfig::load(&config)?, rcs)
        }
        Command::Synth {
            config,
            coefficients,
            block,
        } => commands::cmd_synth(&RunConfig::load(&config)?, coefficients, block),
        Command::Signature {
            config,
            cube,
            kind,
            cpi,
            out_stem,
        } => commands::cmd_signature(&RunConfig::load(&config)?, &cube, &kind, cpi, out_stem),
        Command::Compare {
            config,
            sim_dir,
            measured,
        } => commands::cmd_compare(&RunConfig::load(&config)?, &sim_dir, &measured),
        Command::Sweep { config, rcs } => commands::cmd_sweep(&RunConfig::load(&config)?, rcs),
        Command::Pipeline { config, measured } => {
            commands::cmd_pipeline(&RunConfig::load(&config)?, measured)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<AllBlocksFailed>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
