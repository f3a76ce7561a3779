//! Experiment engine: configuration, seed derivation, Monte Carlo trials,
//! analytic curve tables, parameter sweeps, and CSV/SVG emission.
//!
//! Every run is a pure function of the configuration and the master seed.
//! Trials derive independent seeds from the master seed and the trial
//! index, execute in parallel, and aggregate by commutative counting, so
//! thread count and scheduling never change a result.

mod config;
mod figure;
mod output;
mod sweep;
mod trial;

pub use config::{ChannelConfig, ClusterSpec, DecodeModeConfig, ExperimentConfig};
pub use figure::{figure_curves, FigureParams};
pub use output::{render_csv, render_svg, write_outputs, OutputFormat, SweepRow, CSV_HEADER};
pub use sweep::{run_sweep, single_point_row, GridSpec, SweepConfig};
pub use trial::{derive_trial_seed, run_monte_carlo, run_trial, AggregateResult, TrialResult};

/// Simulation refuses matrices above this many entries unless the
/// configuration opts in; analytic operations have no such limit.
pub const SIMULATION_ENTRY_LIMIT: u128 = 100_000_000;
