//! Pairwise normalized-Hamming clustering.
//!
//! For every pair of rows (or columns) the distance is the fraction of
//! mismatches over positions observed in both; a pair is declared
//! same-cluster when the distance falls below a threshold `d0`. The full
//! partition is the transitive closure of the pairwise decisions
//! (single-linkage over a disjoint-set forest). Pairs with no common
//! observation get the conservative "different" decision.
//!
//! Pair distances for distinct pairs are independent, so they are computed
//! in parallel; the result does not depend on the schedule because every
//! pair writes its own slot and the closure runs afterwards.

use crate::channel::{ChannelStats, ObservedMatrix, ERASURE};
use crate::error::{Error, Result};
use crate::model::Partition;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    Rows,
    Columns,
}

/// Distance statistics for one pair: the number of commonly observed
/// positions and, when that count is positive, the mismatch fraction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairStats {
    pub common: u64,
    pub distance: Option<f64>,
}

/// Common-observation count and mismatch count for two aligned vectors.
#[inline]
fn count_pair(x: &[u8], y: &[u8]) -> (u32, u32) {
    debug_assert_eq!(x.len(), y.len());
    let mut common = 0u32;
    let mut mismatch = 0u32;
    for (&a, &b) in x.iter().zip(y) {
        let seen = (a != ERASURE) & (b != ERASURE);
        common += seen as u32;
        mismatch += (seen & (a != b)) as u32;
    }
    (common, mismatch)
}

fn axis_data(observed: &ObservedMatrix, axis: Axis) -> (usize, usize, Option<Vec<u8>>) {
    match axis {
        Axis::Rows => (observed.rows, observed.cols, None),
        Axis::Columns => (
            observed.cols,
            observed.rows,
            Some(observed.transposed_entries()),
        ),
    }
}

/// Normalized Hamming distance between items `i` and `j` along `axis`,
/// over commonly observed positions. Symmetric in `i`, `j`.
pub fn pair_stats(observed: &ObservedMatrix, i: usize, j: usize, axis: Axis) -> Result<PairStats> {
    let (items, _, transposed) = axis_data(observed, axis);
    if i == j {
        return Err(Error::ParamRange(format!("pair requires i != j, got {i}")));
    }
    if i >= items || j >= items {
        return Err(Error::ParamRange(format!(
            "pair ({i}, {j}) out of range for {items} items"
        )));
    }
    let (x, y): (&[u8], &[u8]) = match (axis, &transposed) {
        (Axis::Rows, _) => (observed.row_slice(i), observed.row_slice(j)),
        (Axis::Columns, Some(t)) => (
            &t[i * observed.rows..(i + 1) * observed.rows],
            &t[j * observed.rows..(j + 1) * observed.rows],
        ),
        _ => unreachable!(),
    };
    let (common, mismatch) = count_pair(x, y);
    Ok(PairStats {
        common: common as u64,
        distance: if common > 0 {
            Some(mismatch as f64 / common as f64)
        } else {
            None
        },
    })
}

/// Upper-triangle record of the pairwise same-cluster decisions.
#[derive(Clone, Debug)]
pub struct PairDecisions {
    items: usize,
    same: Vec<bool>,
}

impl PairDecisions {
    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.items);
        i * (2 * self.items - i - 1) / 2 + (j - i - 1)
    }

    /// Decision for the unordered pair `{i, j}`.
    #[inline]
    pub fn same(&self, i: usize, j: usize) -> bool {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.same[self.index(i, j)]
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn total_pairs(&self) -> u64 {
        self.same.len() as u64
    }
}

/// A recovered partition together with the pairwise decisions it was built
/// from. The partition is the transitive closure of the decisions.
#[derive(Clone, Debug)]
pub struct PartitionEstimate {
    pub partition: Partition,
    pub decisions: PairDecisions,
}

struct DisjointSet {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }
}

/// Clusters one axis of an observed matrix with threshold `d0` in (0, 1):
/// pairs with defined distance below `d0` are declared same-cluster, all
/// other pairs different; the partition is formed by single linkage.
pub fn cluster_axis(observed: &ObservedMatrix, d0: f64, axis: Axis) -> Result<PartitionEstimate> {
    if !(d0 > 0.0 && d0 < 1.0) {
        return Err(Error::ParamRange(format!(
            "threshold d0 must lie in (0, 1), got {d0}"
        )));
    }
    let (items, len, transposed) = axis_data(observed, axis);
    if items == 0 {
        return Err(Error::ShapeMismatch("empty matrix".into()));
    }
    let data: &[u8] = match &transposed {
        Some(t) => t,
        None => &observed.entries,
    };

    let total_pairs = items * items.saturating_sub(1) / 2;
    let mut same = vec![false; total_pairs];
    {
        // Row i owns the contiguous slice of decisions for pairs (i, j > i).
        let mut chunks: Vec<(usize, &mut [bool])> = Vec::with_capacity(items.saturating_sub(1));
        let mut rest = same.as_mut_slice();
        for i in 0..items.saturating_sub(1) {
            let (head, tail) = rest.split_at_mut(items - 1 - i);
            chunks.push((i, head));
            rest = tail;
        }
        chunks.into_par_iter().for_each(|(i, row)| {
            let xi = &data[i * len..(i + 1) * len];
            for (offset, slot) in row.iter_mut().enumerate() {
                let j = i + 1 + offset;
                let xj = &data[j * len..(j + 1) * len];
                let (common, mismatch) = count_pair(xi, xj);
                *slot = common > 0 && (mismatch as f64 / common as f64) < d0;
            }
        });
    }

    let decisions = PairDecisions { items, same };
    let mut dsu = DisjointSet::new(items);
    for i in 0..items.saturating_sub(1) {
        for j in (i + 1)..items {
            if decisions.same(i, j) {
                dsu.union(i as u32, j as u32);
            }
        }
    }
    let raw: Vec<u32> = (0..items as u32).map(|x| dsu.find(x)).collect();
    Ok(PartitionEstimate {
        partition: Partition::canonicalize(&raw),
        decisions,
    })
}

/// Pairwise decision errors against the generating partition, under the
/// conservative convention: a decision is wrong whenever it disagrees with
/// true co-membership, even if the true clusters happen to carry identical
/// values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairErrorCount {
    /// Same-cluster pairs declared different.
    pub false_split: u64,
    /// Different-cluster pairs declared same.
    pub false_merge: u64,
    pub total_pairs: u64,
}

impl PairErrorCount {
    pub fn total_errors(&self) -> u64 {
        self.false_split + self.false_merge
    }
}

pub fn pairwise_errors(estimate: &PartitionEstimate, truth: &Partition) -> Result<PairErrorCount> {
    let n = truth.len();
    if estimate.decisions.items() != n {
        return Err(Error::ShapeMismatch(format!(
            "estimate covers {} items, truth {}",
            estimate.decisions.items(),
            n
        )));
    }
    let mut count = PairErrorCount {
        total_pairs: estimate.decisions.total_pairs(),
        ..Default::default()
    };
    for i in 0..n.saturating_sub(1) {
        for j in (i + 1)..n {
            let declared = estimate.decisions.same(i, j);
            let truly = truth.same_cluster(i, j);
            match (declared, truly) {
                (false, true) => count.false_split += 1,
                (true, false) => count.false_merge += 1,
                _ => {}
            }
        }
    }
    Ok(count)
}

/// Default clustering threshold `(d_lb + 2 d_ub) / 3`, strictly inside the
/// separating interval `(d_lb, d_ub)` that exists for every non-degenerate
/// channel. Errors on a degenerate channel (all rows equal), where no
/// threshold can separate same-cluster from different-cluster pairs.
pub fn default_threshold(stats: &ChannelStats) -> Result<f64> {
    if stats.is_degenerate(1e-12) {
        return Err(Error::DegenerateChannel);
    }
    Ok((stats.same_input_mismatch + 2.0 * stats.independent_mismatch) / 3.0)
}
