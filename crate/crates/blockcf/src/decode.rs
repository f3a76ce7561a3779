//! Per-block value estimation given a clustering, and the end-to-end
//! two-stage estimator (cluster, then decode as if the clustering were
//! correct).
//!
//! Binary data uses the majority decoder; general alphabets use maximum
//! likelihood, which picks the symbol maximizing the sample log-likelihood
//! (equivalently, minimizing the KL divergence from the block's empirical
//! output distribution to the channel row). Exact ties and empty blocks are
//! resolved by a fair draw from a stream keyed by the block coordinates, so
//! blocks can be decoded in parallel without affecting the result.

use crate::channel::{ChannelSpec, ObservedMatrix, ERASURE};
use crate::clustering::{cluster_axis, Axis, PartitionEstimate};
use crate::error::{Error, Result};
use crate::model::{Partition, RatingInstance};
use crate::rng::{tag, Stream};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeMode {
    /// Most frequent observed symbol; binary alphabets only.
    Majority,
    /// Argmax of the sample log-likelihood under the channel.
    MaximumLikelihood,
}

impl DecodeMode {
    /// Majority for binary alphabets, maximum likelihood otherwise.
    pub fn default_for(alphabet_size: usize) -> Self {
        if alphabet_size == 2 {
            DecodeMode::Majority
        } else {
            DecodeMode::MaximumLikelihood
        }
    }
}

/// A decoded matrix, constant on the supplied blocks, plus the number of
/// non-erased samples each block was decoded from.
#[derive(Clone, Debug)]
pub struct DecodedMatrix {
    pub rows: usize,
    pub cols: usize,
    pub matrix: Vec<u8>,
    /// `r x t` sample counts, row-major over (row cluster, column cluster).
    pub sample_counts: Vec<u64>,
}

fn check_partitions(
    observed: &ObservedMatrix,
    row_part: &Partition,
    col_part: &Partition,
) -> Result<()> {
    if row_part.len() != observed.rows || col_part.len() != observed.cols {
        return Err(Error::ShapeMismatch(format!(
            "partitions cover {}x{}, matrix is {}x{}",
            row_part.len(),
            col_part.len(),
            observed.rows,
            observed.cols
        )));
    }
    Ok(())
}

/// Per-block symbol counts: `counts[cluster][symbol]`.
fn block_counts(
    observed: &ObservedMatrix,
    row_part: &Partition,
    col_part: &Partition,
    symbols: usize,
) -> Vec<Vec<u64>> {
    let t = col_part.num_clusters();
    let r = row_part.num_clusters();
    let mut counts = vec![vec![0u64; symbols]; r * t];
    for a in 0..observed.rows {
        let base = row_part.label(a) as usize * t;
        let row = observed.row_slice(a);
        for (b, &y) in row.iter().enumerate() {
            if y != ERASURE {
                counts[base + col_part.label(b) as usize][y as usize] += 1;
            }
        }
    }
    counts
}

fn fill_blocks(
    observed: &ObservedMatrix,
    row_part: &Partition,
    col_part: &Partition,
    block_values: &[u8],
) -> Vec<u8> {
    let t = col_part.num_clusters();
    let mut matrix = vec![0u8; observed.rows * observed.cols];
    for a in 0..observed.rows {
        let base = row_part.label(a) as usize * t;
        let out = &mut matrix[a * observed.cols..(a + 1) * observed.cols];
        for (b, slot) in out.iter_mut().enumerate() {
            *slot = block_values[base + col_part.label(b) as usize];
        }
    }
    matrix
}

/// Majority decoding for binary data. Each block takes the more frequent of
/// its non-erased observations; exact ties (including empty blocks) fall to
/// a fair coin keyed by `(seed, row cluster, column cluster)`.
pub fn majority_decode(
    observed: &ObservedMatrix,
    row_part: &Partition,
    col_part: &Partition,
    seed: u64,
) -> Result<DecodedMatrix> {
    if observed.alphabet_size != 2 {
        return Err(Error::InvalidAlphabet(format!(
            "majority decoding requires a binary alphabet, got {} symbols; use maximum likelihood",
            observed.alphabet_size
        )));
    }
    check_partitions(observed, row_part, col_part)?;
    let t = col_part.num_clusters();
    let counts = block_counts(observed, row_part, col_part, 2);

    let mut block_values = vec![0u8; counts.len()];
    let mut sample_counts = vec![0u64; counts.len()];
    for (cell, count) in counts.iter().enumerate() {
        let (zeros, ones) = (count[0], count[1]);
        sample_counts[cell] = zeros + ones;
        block_values[cell] = match zeros.cmp(&ones) {
            std::cmp::Ordering::Greater => 0,
            std::cmp::Ordering::Less => 1,
            std::cmp::Ordering::Equal => {
                let (i, j) = (cell / t, cell % t);
                Stream::keyed(seed, tag::TIE_BREAK, i as u64, j as u64).next_bool() as u8
            }
        };
    }

    Ok(DecodedMatrix {
        rows: observed.rows,
        cols: observed.cols,
        matrix: fill_blocks(observed, row_part, col_part, &block_values),
        sample_counts,
    })
}

/// Maximum-likelihood decoding for any alphabet: each block takes the
/// symbol `a` maximizing `sum_samples ln q(y | a)`. Symbols tied at the
/// maximum (always the case for empty blocks, where every score is zero)
/// are resolved uniformly at random from the keyed stream. Errors if some
/// observed symbol has zero probability under every channel input.
pub fn ml_decode(
    observed: &ObservedMatrix,
    row_part: &Partition,
    col_part: &Partition,
    spec: &ChannelSpec,
    seed: u64,
) -> Result<DecodedMatrix> {
    if spec.alphabet_size() != observed.alphabet_size {
        return Err(Error::AlphabetMismatch {
            data: observed.alphabet_size,
            channel: spec.alphabet_size(),
        });
    }
    check_partitions(observed, row_part, col_part)?;
    let k = spec.alphabet_size();
    let t = col_part.num_clusters();
    let counts = block_counts(observed, row_part, col_part, k);

    // ln q(y|x), with -inf marking forbidden transitions
    let log_q: Vec<f64> = (0..k)
        .flat_map(|x| (0..k).map(move |y| (x, y)))
        .map(|(x, y)| {
            let q = spec.prob(x as u8, y as u8);
            if q > 0.0 {
                q.ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();

    let mut block_values = vec![0u8; counts.len()];
    let mut sample_counts = vec![0u64; counts.len()];
    let mut tied = Vec::with_capacity(k);
    for (cell, count) in counts.iter().enumerate() {
        sample_counts[cell] = count.iter().sum();
        let mut best = f64::NEG_INFINITY;
        tied.clear();
        for a in 0..k {
            let mut score = 0.0;
            for (y, &c) in count.iter().enumerate() {
                if c > 0 {
                    score += c as f64 * log_q[a * k + y];
                }
            }
            if score > best {
                best = score;
                tied.clear();
                tied.push(a as u8);
            } else if score == best {
                tied.push(a as u8);
            }
        }
        if best == f64::NEG_INFINITY {
            // some observed symbol is impossible under every input
            let bad = count
                .iter()
                .enumerate()
                .find(|(y, &c)| c > 0 && (0..k).all(|a| log_q[a * k + y] == f64::NEG_INFINITY))
                .map(|(y, _)| y as u8)
                .unwrap_or(0);
            return Err(Error::ImpossibleObservation { symbol: bad });
        }
        block_values[cell] = if tied.len() == 1 {
            tied[0]
        } else {
            let (i, j) = (cell / t, cell % t);
            let mut stream = Stream::keyed(seed, tag::TIE_BREAK, i as u64, j as u64);
            tied[stream.next_below(tied.len() as u64) as usize]
        };
    }

    Ok(DecodedMatrix {
        rows: observed.rows,
        cols: observed.cols,
        matrix: fill_blocks(observed, row_part, col_part, &block_values),
        sample_counts,
    })
}

/// Block error indicator: true iff any entry of the decoded matrix differs
/// from the ground truth.
pub fn block_error(decoded: &DecodedMatrix, truth: &RatingInstance) -> Result<bool> {
    if decoded.rows != truth.rows() || decoded.cols != truth.cols() {
        return Err(Error::ShapeMismatch(format!(
            "decoded {}x{} vs truth {}x{}",
            decoded.rows,
            decoded.cols,
            truth.rows(),
            truth.cols()
        )));
    }
    Ok(decoded.matrix != truth.matrix)
}

/// Output of the two-stage estimator.
#[derive(Clone, Debug)]
pub struct EstimateOutcome {
    pub decoded: DecodedMatrix,
    pub row_estimate: PartitionEstimate,
    pub col_estimate: PartitionEstimate,
}

/// The two-stage estimator: cluster rows and columns with threshold `d0`,
/// then decode assuming the estimated clustering is correct.
pub fn estimate_matrix(
    observed: &ObservedMatrix,
    d0: f64,
    spec: &ChannelSpec,
    mode: DecodeMode,
    seed: u64,
) -> Result<EstimateOutcome> {
    let row_estimate = cluster_axis(observed, d0, Axis::Rows)?;
    let col_estimate = cluster_axis(observed, d0, Axis::Columns)?;
    let decoded = match mode {
        DecodeMode::Majority => majority_decode(
            observed,
            &row_estimate.partition,
            &col_estimate.partition,
            seed,
        )?,
        DecodeMode::MaximumLikelihood => ml_decode(
            observed,
            &row_estimate.partition,
            &col_estimate.partition,
            spec,
            seed,
        )?,
    };
    Ok(EstimateOutcome {
        decoded,
        row_estimate,
        col_estimate,
    })
}
