//! The observation channel: a discrete memoryless channel followed by an
//! erasure channel.
//!
//! Every matrix entry independently passes through the DMC and is then
//! erased with probability `epsilon`. The per-entry randomness is keyed by
//! `(seed, row, col)`, so transmission is schedule-independent and disjoint
//! regions may be processed in parallel without changing the output.

use crate::error::{Error, Result};
use crate::model::RatingInstance;
use crate::rng::{tag, Stream};

/// Sentinel for an erased entry; never a valid symbol.
pub const ERASURE: u8 = u8::MAX;

/// Tolerance for row-stochasticity; rows within it are renormalized, rows
/// further out are rejected.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// A DMC transition matrix plus an erasure probability.
#[derive(Clone, Debug)]
pub struct ChannelSpec {
    size: usize,
    /// `size x size` row-stochastic matrix, row-major: `transition[x*size+y]`
    /// is the probability of output `y` on input `x`.
    transition: Vec<f64>,
    erasure: f64,
}

impl ChannelSpec {
    /// Binary symmetric channel with flip probability `p`.
    pub fn bsc(p: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParamRange(format!("BSC flip probability {p}")));
        }
        Self::from_rows(&[vec![1.0 - p, p], vec![p, 1.0 - p]], epsilon)
    }

    /// Noiseless channel on `size` symbols.
    pub fn identity(size: usize, epsilon: f64) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..size)
            .map(|x| (0..size).map(|y| if x == y { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_rows(&rows, epsilon)
    }

    /// General DMC from explicit transition rows. Rows must be square,
    /// nonnegative, and sum to 1 within [`ROW_SUM_TOLERANCE`]; they are
    /// renormalized exactly to 1 on load.
    pub fn from_rows(rows: &[Vec<f64>], epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::ParamRange(format!("erasure probability {epsilon}")));
        }
        let size = rows.len();
        if !(2..=255).contains(&size) {
            return Err(Error::InvalidChannel(format!(
                "alphabet size must be in 2..=255, got {size}"
            )));
        }
        let mut transition = Vec::with_capacity(size * size);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidChannel(format!(
                    "row {x} has {} entries, expected {size}",
                    row.len()
                )));
            }
            if row.iter().any(|&q| !(0.0..=1.0).contains(&q) || q.is_nan()) {
                return Err(Error::InvalidChannel(format!(
                    "row {x} has entries outside [0, 1]"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::InvalidChannel(format!(
                    "row {x} sums to {sum}, outside tolerance {ROW_SUM_TOLERANCE}"
                )));
            }
            transition.extend(row.iter().map(|&q| q / sum));
        }
        Ok(ChannelSpec {
            size,
            transition,
            erasure: epsilon,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.size
    }

    pub fn erasure(&self) -> f64 {
        self.erasure
    }

    /// Transition probability `q(y|x)`.
    #[inline]
    pub fn prob(&self, x: u8, y: u8) -> f64 {
        self.transition[x as usize * self.size + y as usize]
    }

    pub fn row(&self, x: u8) -> &[f64] {
        &self.transition[x as usize * self.size..(x as usize + 1) * self.size]
    }
}

/// An observed matrix over the alphabet plus [`ERASURE`], row-major.
#[derive(Clone, Debug)]
pub struct ObservedMatrix {
    pub rows: usize,
    pub cols: usize,
    pub alphabet_size: usize,
    pub entries: Vec<u8>,
}

impl ObservedMatrix {
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u8 {
        self.entries[a * self.cols + b]
    }

    pub fn row_slice(&self, a: usize) -> &[u8] {
        &self.entries[a * self.cols..(a + 1) * self.cols]
    }

    /// Column-major copy, used for clustering along columns.
    pub fn transposed_entries(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.entries.len()];
        for a in 0..self.rows {
            let row = self.row_slice(a);
            for (b, &v) in row.iter().enumerate() {
                out[b * self.rows + a] = v;
            }
        }
        out
    }
}

/// Passes every entry through the DMC, then the erasure channel, in that
/// fixed order. Pure in `(instance, spec, seed)`.
pub fn transmit(
    instance: &RatingInstance,
    spec: &ChannelSpec,
    seed: u64,
) -> Result<ObservedMatrix> {
    if spec.alphabet_size() != instance.alphabet.size() {
        return Err(Error::AlphabetMismatch {
            data: instance.alphabet.size(),
            channel: spec.alphabet_size(),
        });
    }
    let rows = instance.rows();
    let cols = instance.cols();
    let mut entries = vec![0u8; rows * cols];
    for a in 0..rows {
        for b in 0..cols {
            let mut stream = Stream::keyed(seed, tag::TRANSMIT, a as u64, b as u64);
            let x = instance.matrix[a * cols + b];
            let y = sample_output(spec, x, stream.next_f64());
            let erased = stream.next_f64() < spec.erasure;
            entries[a * cols + b] = if erased { ERASURE } else { y };
        }
    }
    Ok(ObservedMatrix {
        rows,
        cols,
        alphabet_size: spec.alphabet_size(),
        entries,
    })
}

#[inline]
fn sample_output(spec: &ChannelSpec, x: u8, u: f64) -> u8 {
    let row = spec.row(x);
    let mut acc = 0.0;
    for (y, &q) in row.iter().enumerate() {
        acc += q;
        if u < acc {
            return y as u8;
        }
    }
    (row.len() - 1) as u8
}

/// Channel-derived mismatch statistics.
///
/// `pair_mismatch[p][q]` is the probability that two independent channel
/// outputs differ given inputs `p` and `q`. Averaging the diagonal gives the
/// expected mismatch rate of two observations of the *same* symbol
/// (`same_input_mismatch`, a lower reference point for clustering
/// distances); averaging everything gives the rate for two independent
/// uniform symbols (`independent_mismatch`, the upper reference point).
#[derive(Clone, Debug)]
pub struct ChannelStats {
    pub alphabet_size: usize,
    /// Row-major `k x k` matrix of pairwise output-mismatch probabilities.
    pub pair_mismatch: Vec<f64>,
    /// `d_lb`: mean of the diagonal.
    pub same_input_mismatch: f64,
    /// `d_ub`: mean over all input pairs.
    pub independent_mismatch: f64,
}

impl ChannelStats {
    #[inline]
    pub fn mismatch(&self, p: u8, q: u8) -> f64 {
        self.pair_mismatch[p as usize * self.alphabet_size + q as usize]
    }

    /// True iff the two reference rates coincide within `tol`, which happens
    /// exactly when all transition rows are equal (useless channel).
    pub fn is_degenerate(&self, tol: f64) -> bool {
        self.independent_mismatch - self.same_input_mismatch <= tol
    }
}

pub fn channel_stats(spec: &ChannelSpec) -> ChannelStats {
    let k = spec.alphabet_size();
    let mut pair_mismatch = vec![0.0; k * k];
    for p in 0..k {
        for q in 0..k {
            // sum_{y != z} q(y|p) q(z|q) = 1 - sum_y q(y|p) q(y|q)
            let agree: f64 = (0..k)
                .map(|y| spec.prob(p as u8, y as u8) * spec.prob(q as u8, y as u8))
                .sum();
            pair_mismatch[p * k + q] = 1.0 - agree;
        }
    }
    let same_input_mismatch = (0..k).map(|p| pair_mismatch[p * k + p]).sum::<f64>() / k as f64;
    let independent_mismatch = pair_mismatch.iter().sum::<f64>() / (k * k) as f64;
    ChannelStats {
        alphabet_size: k,
        pair_mismatch,
        same_input_mismatch,
        independent_mismatch,
    }
}
