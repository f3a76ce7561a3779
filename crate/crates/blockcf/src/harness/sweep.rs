//! Parameter sweeps: a base experiment crossed with per-axis value lists.
//! Each grid point produces one output row carrying the analytic bounds
//! plus the empirical rates when trials were requested; a failing point is
//! recorded in its row's flag column and the sweep continues.

use crate::bounds::{binary_report, clustering_bound};
use crate::error::Result;
use crate::harness::output::SweepRow;
use crate::harness::trial::run_monte_carlo;
use crate::harness::{ChannelConfig, ClusterSpec, ExperimentConfig};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// BSC flip probabilities (BSC base channels only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Vec<f64>>,
    /// Uniform square cluster sides.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    #[serde(default)]
    pub grid: GridSpec,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// All grid points as concrete experiment configs. Axes with no list
    /// contribute the base value, so an empty grid yields exactly the base.
    pub fn points(&self) -> Vec<ExperimentConfig> {
        let (base_p, base_eps) = self.base.bsc_params().unwrap_or((f64::NAN, f64::NAN));
        let ps = self.grid.p.clone().unwrap_or_else(|| vec![base_p]);
        let epsilons = self.grid.epsilon.clone().unwrap_or_else(|| vec![base_eps]);
        let sides: Vec<Option<u64>> = match &self.grid.n0 {
            Some(list) => list.iter().map(|&v| Some(v)).collect(),
            None => vec![None],
        };

        let mut points = Vec::new();
        for &p in &ps {
            for &epsilon in &epsilons {
                for &side in &sides {
                    let mut config = self.base.clone();
                    if let ChannelConfig::Bsc { .. } = config.channel {
                        config.channel = ChannelConfig::Bsc { p, epsilon };
                    }
                    if let Some(n0) = side {
                        config.cluster_spec = ClusterSpec::Uniform { m0: n0, n0 };
                    }
                    points.push(config);
                }
            }
        }
        points
    }
}

/// Runs every grid point and renders one row each. Analytic bounds are
/// filled for BSC channels; empirical rates are filled when the point's
/// trial count is positive. Errors never abort the sweep.
pub fn run_sweep(sweep: &SweepConfig) -> Vec<SweepRow> {
    sweep.points().iter().map(point_row).collect()
}

fn point_row(config: &ExperimentConfig) -> SweepRow {
    let mut row = SweepRow {
        trials: config.trials,
        master_seed: config.master_seed,
        ..Default::default()
    };

    let (s_low, s_star) = match config.partitions() {
        Ok((rows, cols)) => {
            let row_sizes = rows.cluster_sizes();
            let col_sizes = cols.cluster_sizes();
            row.m0 = *row_sizes.iter().min().unwrap() as u64;
            row.n0 = *col_sizes.iter().min().unwrap() as u64;
            let mut low = u64::MAX;
            let mut high = 0;
            for &mi in row_sizes {
                for &nj in col_sizes {
                    let area = mi as u64 * nj as u64;
                    low = low.min(area);
                    high = high.max(area);
                }
            }
            row.area = low;
            (low, high)
        }
        Err(err) => {
            row.flags.push(format!("error:{err}"));
            return row;
        }
    };

    if let Some((p, epsilon)) = config.bsc_params() {
        match binary_report(p, epsilon, config.m, config.n, s_low, s_star) {
            Ok(report) => {
                row.threshold_area = Some(report.threshold_area);
                row.fill_lb = Some(report.fill_lower);
                row.fill_ub = report.fill_upper;
                if report.fill_upper.is_none() {
                    row.flags.push("fill_ub_hypothesis_violated".into());
                }
            }
            Err(err) => row.flags.push(format!("bounds_error:{err}")),
        }
        match config
            .resolve_threshold()
            .and_then(|d0| {
                let t = config.n as f64 / row.n0.max(1) as f64;
                clustering_bound(config.n, t, row.n0, p, epsilon, d0, config.r1, config.r2)
            }) {
            Ok(report) => {
                row.clust_same_ub = Some(report.split_bound);
                row.clust_diff_p1 = Some(report.merge_bound);
            }
            Err(err) => row.flags.push(format!("clustering_bound_error:{err}")),
        }
    } else {
        row.flags.push("general_channel:fill_bounds_are_binary_only".into());
    }

    if config.trials > 0 {
        match run_monte_carlo(config) {
            Ok(agg) => {
                row.emp_pe = Some(agg.block_error_rate);
                row.emp_pe_ci3 = Some(agg.block_error_half_width);
                row.emp_prc = Some(agg.pair_error_rate);
                row.emp_prc_ci3 = Some(agg.pair_error_half_width);
            }
            Err(err) => row.flags.push(format!("simulation_error:{err}")),
        }
    }
    row
}

/// A single config rendered as one sweep row (used by the `simulate`
/// command so its CSV matches sweep output byte for byte).
pub fn single_point_row(config: &ExperimentConfig) -> SweepRow {
    point_row(config)
}
