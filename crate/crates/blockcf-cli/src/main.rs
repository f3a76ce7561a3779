//! Command-line harness: analytic bounds, exact error evaluation, curve
//! tables, Monte Carlo simulation, and parameter sweeps, all driven by a
//! JSON experiment configuration.
//!
//! Results print as JSON on stdout or land in CSV/SVG files; failures exit
//! nonzero with a single machine-readable JSON error line on stderr.

use anyhow::{bail, Context};
use blockcf::bounds::{binary_report, chernoff_constants, exact_fill_error};
use blockcf::harness::{
    figure_curves, render_csv, run_monte_carlo, run_sweep, single_point_row, write_outputs,
    ExperimentConfig, FigureParams, OutputFormat, SweepConfig,
};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "blockcf",
    about = "Block-constant matrix recovery: bounds, exact error formulas, and Monte Carlo experiments",
    version
)]
struct Cli {
    /// Size of the worker thread pool (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,

    /// Override the configuration's master seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Output path stem; format extensions are appended.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Comma-separated output formats (csv,svg).
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Reliability constant, recovery threshold, and fill-error bounds for
    /// the configured channel and cluster shape.
    Bounds {
        #[command(flatten)]
        common: CommonArgs,
        /// Gap parameter for the general-channel reliability constants.
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
    },
    /// Exact block-error probability of majority decoding with known
    /// clustering (BSC channels).
    Exact {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Analytic curve table over a range of uniform cluster sides.
    Figure1 {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 10)]
        n0_min: u64,
        #[arg(long, default_value_t = 150)]
        n0_max: u64,
    },
    /// Monte Carlo estimate of the block-error and clustering-error rates.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// A grid of experiments, one CSV row per point.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // a second pool configuration in one process is fine to ignore
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    if let Err(err) = run(cli.command) {
        eprintln!("{}", json!({ "error": format!("{err:#}") }));
        std::process::exit(1);
    }
}

fn load_config(common: &CommonArgs) -> anyhow::Result<ExperimentConfig> {
    let mut config = ExperimentConfig::from_file(&common.config)
        .with_context(|| format!("loading {}", common.config.display()))?;
    if let Some(seed) = common.seed {
        config.master_seed = seed;
    }
    Ok(config)
}

fn emit_rows(
    rows: &[blockcf::harness::SweepRow],
    common: &CommonArgs,
) -> anyhow::Result<()> {
    let formats = OutputFormat::parse_list(&common.format)?;
    match &common.out {
        Some(stem) => {
            let written = write_outputs(rows, &formats, stem)?;
            for path in written {
                eprintln!("wrote {}", path.display());
            }
        }
        None => print!("{}", render_csv(rows)),
    }
    Ok(())
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Bounds { common, delta } => {
            let config = load_config(&common)?;
            let spec = config.channel_spec()?;
            let (rows, cols) = config.partitions()?;
            let mut s_low = u64::MAX;
            let mut s_star = 0u64;
            for &mi in rows.cluster_sizes() {
                for &nj in cols.cluster_sizes() {
                    let area = mi as u64 * nj as u64;
                    s_low = s_low.min(area);
                    s_star = s_star.max(area);
                }
            }
            let binary = config
                .bsc_params()
                .map(|(p, epsilon)| binary_report(p, epsilon, config.m, config.n, s_low, s_star))
                .transpose()?;
            let general = chernoff_constants(&spec, config.m, config.n, delta)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "binary": binary,
                    "general": general,
                    "minArea": s_low,
                    "maxArea": s_star,
                }))?
            );
            Ok(())
        }
        Command::Exact { common } => {
            let config = load_config(&common)?;
            let Some((p, epsilon)) = config.bsc_params() else {
                bail!("exact fill error is defined for BSC channels");
            };
            let value = exact_fill_error(
                &config.row_sizes()?,
                &config.col_sizes()?,
                p,
                epsilon,
            )?;
            println!("{}", json!({ "exactFillError": value }));
            Ok(())
        }
        Command::Figure1 {
            common,
            n0_min,
            n0_max,
        } => {
            let config = load_config(&common)?;
            let Some((p, epsilon)) = config.bsc_params() else {
                bail!("the curve table is defined for BSC channels");
            };
            let rows = figure_curves(&FigureParams {
                m: config.m,
                n: config.n,
                p,
                epsilon,
                d0: config.d0,
                r1: config.r1,
                r2: config.r2,
                n0_min,
                n0_max,
                master_seed: config.master_seed,
            })?;
            emit_rows(&rows, &common)
        }
        Command::Simulate { common } => {
            let config = load_config(&common)?;
            let aggregate = run_monte_carlo(&config)?;
            eprintln!(
                "{} trials in {:.2}s",
                aggregate.trials, aggregate.wall_seconds
            );
            println!("{}", serde_json::to_string_pretty(&aggregate)?);
            if common.out.is_some() {
                let row = single_point_row(&config);
                emit_rows(&[row], &common)?;
            }
            Ok(())
        }
        Command::Sweep { common } => {
            let text = std::fs::read_to_string(&common.config)
                .with_context(|| format!("loading {}", common.config.display()))?;
            let mut sweep = SweepConfig::from_json(&text)?;
            if let Some(seed) = common.seed {
                sweep.base.master_seed = seed;
            }
            let rows = run_sweep(&sweep);
            emit_rows(&rows, &common)
        }
    }
}
