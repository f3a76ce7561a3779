//! Single trials and Monte Carlo aggregation.

use crate::channel::{channel_stats, transmit};
use crate::clustering::{pairwise_errors, PairErrorCount};
use crate::decode::{block_error, estimate_matrix, majority_decode, ml_decode, DecodeMode};
use crate::error::Result;
use crate::harness::ExperimentConfig;
use crate::model::{effective_stats, generate_instance};
use crate::rng::mix;
use rayon::prelude::*;
use serde::Serialize;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Seed for one trial: `mix(master + GOLDEN * (index + 1))`. The multiplier
/// is odd, so the inner map is a bijection of the index for every master
/// seed, and the outer finalizer is a bijection of the sum; distinct trial
/// indices therefore never collide, for any master seed.
pub fn derive_trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    mix(master_seed.wrapping_add(GOLDEN.wrapping_mul(trial_index.wrapping_add(1))))
}

/// Outcome of one generate-transmit-cluster-decode trial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialResult {
    pub block_error: bool,
    pub row_pair_errors: PairErrorCount,
    pub col_pair_errors: PairErrorCount,
    /// True when the drawn instance had identical-valued clusters merged.
    pub merged_occurred: bool,
    pub seed: u64,
}

/// Runs trial `trial_index` of `config`: generate, transmit, cluster (or
/// take the generating partitions when `knownClustering` is set), decode,
/// compare. Fully determined by `(config, trial_index)`.
pub fn run_trial(config: &ExperimentConfig, trial_index: u64) -> Result<TrialResult> {
    config.check_simulation_size()?;
    let (row_part, col_part) = config.partitions()?;
    let spec = config.channel_spec()?;
    let alphabet = config.alphabet()?;
    let mode = config.decode_mode()?;
    let seed = derive_trial_seed(config.master_seed, trial_index);

    let instance = generate_instance(&row_part, &col_part, alphabet, seed);
    let merged_occurred = effective_stats(&instance).any_merge(&instance);
    let observed = transmit(&instance, &spec, seed)?;

    let (decoded, row_pair_errors, col_pair_errors) = if config.known_clustering {
        let decoded = match mode {
            DecodeMode::Majority => majority_decode(&observed, &row_part, &col_part, seed)?,
            DecodeMode::MaximumLikelihood => {
                ml_decode(&observed, &row_part, &col_part, &spec, seed)?
            }
        };
        (decoded, PairErrorCount::default(), PairErrorCount::default())
    } else {
        let stats = channel_stats(&spec);
        let d0 = config.threshold(&stats)?;
        let outcome = estimate_matrix(&observed, d0, &spec, mode, seed)?;
        let row_errs = pairwise_errors(&outcome.row_estimate, &row_part)?;
        let col_errs = pairwise_errors(&outcome.col_estimate, &col_part)?;
        (outcome.decoded, row_errs, col_errs)
    };

    Ok(TrialResult {
        block_error: block_error(&decoded, &instance)?,
        row_pair_errors,
        col_pair_errors,
        merged_occurred,
        seed,
    })
}

/// Aggregated Monte Carlo estimates with normal-approximation 3-sigma
/// half-widths. For rates of exactly 0 or 1 the half-width degenerates, so
/// the rule-of-three bound `3 / trials` is reported instead.
#[derive(Clone, Debug, Serialize)]
pub struct AggregateResult {
    /// Fraction of trials with a block error.
    pub block_error_rate: f64,
    pub block_error_half_width: f64,
    /// Fraction of trials with at least one row-pair decision error (zero
    /// by construction under known clustering).
    pub pair_error_rate: f64,
    pub pair_error_half_width: f64,
    pub trials: u64,
    #[serde(skip)]
    pub wall_seconds: f64,
}

fn half_width(rate: f64, trials: u64) -> f64 {
    if rate == 0.0 || rate == 1.0 {
        3.0 / trials as f64
    } else {
        3.0 * (rate * (1.0 - rate) / trials as f64).sqrt()
    }
}

/// Runs `config.trials` independent trials in parallel and aggregates by
/// counting. Aggregation is commutative, so the result is identical under
/// any schedule or thread count.
pub fn run_monte_carlo(config: &ExperimentConfig) -> Result<AggregateResult> {
    config.validate()?;
    config.check_simulation_size()?;
    let start = std::time::Instant::now();
    let (errors, pair_trials) = (0..config.trials)
        .into_par_iter()
        .map(|index| -> Result<(u64, u64)> {
            let trial = run_trial(config, index)?;
            let pair_bad = trial.row_pair_errors.total_errors() > 0;
            Ok((trial.block_error as u64, pair_bad as u64))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;

    let trials = config.trials;
    let block_error_rate = errors as f64 / trials as f64;
    let pair_error_rate = pair_trials as f64 / trials as f64;
    Ok(AggregateResult {
        block_error_rate,
        block_error_half_width: half_width(block_error_rate, trials),
        pair_error_rate,
        pair_error_half_width: half_width(pair_error_rate, trials),
        trials,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
