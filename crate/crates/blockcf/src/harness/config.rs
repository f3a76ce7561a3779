//! Experiment configuration, loaded from a single JSON document.
//!
//! Unknown keys are rejected so a typo fails fast instead of silently
//! running a default. The channel is either
//! `{"type": "bsc", "p": 0.25, "epsilon": 0.9}` or
//! `{"type": "dmc", "matrix": [[...], ...], "epsilon": 0.9}`.

use crate::channel::{channel_stats, ChannelSpec, ChannelStats};
use crate::clustering::default_threshold;
use crate::decode::DecodeMode;
use crate::error::{Error, Result};
use crate::harness::SIMULATION_ENTRY_LIMIT;
use crate::model::{Alphabet, Partition};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: u64,
    pub n: u64,
    #[serde(rename = "clusterSpec")]
    pub cluster_spec: ClusterSpec,
    /// Optional; must match the channel's alphabet when present.
    #[serde(rename = "alphabetSize", default, skip_serializing_if = "Option::is_none")]
    pub alphabet_size: Option<usize>,
    pub channel: ChannelConfig,
    /// Clustering threshold; defaults to the channel's separating value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d0: Option<f64>,
    /// Defaults to majority for binary alphabets, maximum likelihood
    /// otherwise.
    #[serde(rename = "decodeMode", default, skip_serializing_if = "Option::is_none")]
    pub decode_mode: Option<DecodeModeConfig>,
    /// Skip clustering and decode with the generating partitions.
    #[serde(rename = "knownClustering", default)]
    pub known_clustering: bool,
    pub trials: u64,
    #[serde(rename = "masterSeed")]
    pub master_seed: u64,
    #[serde(default = "default_r1")]
    pub r1: f64,
    #[serde(default = "default_r2")]
    pub r2: f64,
    #[serde(rename = "outputPath", default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    /// Lift the 10^8-entry simulation guardrail.
    #[serde(rename = "allowLargeSim", default)]
    pub allow_large_sim: bool,
}

fn default_r1() -> f64 {
    1.5
}

fn default_r2() -> f64 {
    0.5
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum ClusterSpec {
    #[serde(rename = "uniform")]
    Uniform { m0: u64, n0: u64 },
    #[serde(rename = "explicit")]
    Explicit {
        #[serde(rename = "rowSizes")]
        row_sizes: Vec<u32>,
        #[serde(rename = "colSizes")]
        col_sizes: Vec<u32>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum ChannelConfig {
    #[serde(rename = "bsc")]
    Bsc { p: f64, epsilon: f64 },
    #[serde(rename = "dmc")]
    Dmc { matrix: Vec<Vec<f64>>, epsilon: f64 },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub enum DecodeModeConfig {
    #[serde(rename = "majority")]
    Majority,
    #[serde(rename = "ml")]
    MaximumLikelihood,
}

impl From<DecodeModeConfig> for DecodeMode {
    fn from(value: DecodeModeConfig) -> Self {
        match value {
            DecodeModeConfig::Majority => DecodeMode::Majority,
            DecodeModeConfig::MaximumLikelihood => DecodeMode::MaximumLikelihood,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        self.partitions()?;
        let spec = self.channel_spec()?;
        if let Some(size) = self.alphabet_size {
            if size != spec.alphabet_size() {
                return Err(Error::Config(format!(
                    "alphabetSize {size} does not match the channel alphabet {}",
                    spec.alphabet_size()
                )));
            }
        }
        if let Some(d0) = self.d0 {
            if !(d0 > 0.0 && d0 < 1.0) {
                return Err(Error::Config(format!("d0 must lie in (0, 1), got {d0}")));
            }
        }
        if let Some(DecodeModeConfig::Majority) = self.decode_mode {
            if spec.alphabet_size() != 2 {
                return Err(Error::Config(
                    "majority decoding requires a binary alphabet".into(),
                ));
            }
        }
        Ok(())
    }

    /// Enforces the simulation guardrail.
    pub fn check_simulation_size(&self) -> Result<()> {
        let entries = self.m as u128 * self.n as u128;
        if entries > SIMULATION_ENTRY_LIMIT && !self.allow_large_sim {
            return Err(Error::TooLargeForSimulation { entries });
        }
        Ok(())
    }

    pub fn partitions(&self) -> Result<(Partition, Partition)> {
        match &self.cluster_spec {
            ClusterSpec::Uniform { m0, n0 } => Ok((
                Partition::uniform(self.m as usize, *m0 as usize)?,
                Partition::uniform(self.n as usize, *n0 as usize)?,
            )),
            ClusterSpec::Explicit {
                row_sizes,
                col_sizes,
            } => {
                let rows = Partition::from_sizes(row_sizes)?;
                let cols = Partition::from_sizes(col_sizes)?;
                if rows.len() as u64 != self.m || cols.len() as u64 != self.n {
                    return Err(Error::Config(format!(
                        "explicit sizes cover {}x{}, matrix is {}x{}",
                        rows.len(),
                        cols.len(),
                        self.m,
                        self.n
                    )));
                }
                Ok((rows, cols))
            }
        }
    }

    pub fn row_sizes(&self) -> Result<Vec<u32>> {
        Ok(self.partitions()?.0.cluster_sizes().to_vec())
    }

    pub fn col_sizes(&self) -> Result<Vec<u32>> {
        Ok(self.partitions()?.1.cluster_sizes().to_vec())
    }

    pub fn channel_spec(&self) -> Result<ChannelSpec> {
        match &self.channel {
            ChannelConfig::Bsc { p, epsilon } => ChannelSpec::bsc(*p, *epsilon),
            ChannelConfig::Dmc { matrix, epsilon } => ChannelSpec::from_rows(matrix, *epsilon),
        }
    }

    pub fn alphabet(&self) -> Result<Alphabet> {
        Alphabet::new(self.channel_spec()?.alphabet_size())
    }

    /// The clustering threshold: the explicit `d0` if given, otherwise the
    /// channel's default separating threshold.
    pub fn threshold(&self, stats: &ChannelStats) -> Result<f64> {
        match self.d0 {
            Some(d0) => Ok(d0),
            None => default_threshold(stats),
        }
    }

    pub fn resolve_threshold(&self) -> Result<f64> {
        self.threshold(&channel_stats(&self.channel_spec()?))
    }

    pub fn decode_mode(&self) -> Result<DecodeMode> {
        Ok(match self.decode_mode {
            Some(mode) => mode.into(),
            None => DecodeMode::default_for(self.channel_spec()?.alphabet_size()),
        })
    }

    /// BSC parameters when the channel is a BSC.
    pub fn bsc_params(&self) -> Option<(f64, f64)> {
        match &self.channel {
            ChannelConfig::Bsc { p, epsilon } => Some((*p, *epsilon)),
            ChannelConfig::Dmc { .. } => None,
        }
    }
}
