//! The block-constant rating-matrix ensemble.
//!
//! Rows and columns each carry a partition into clusters; the hidden matrix
//! is constant on every product of a row cluster and a column cluster, and
//! the per-block values are drawn i.i.d. uniform over a finite alphabet.
//! Two clusters can coincidentally draw identical value vectors, in which
//! case the matrix alone cannot distinguish them; [`effective_stats`]
//! reports the cluster structure after merging such duplicates, and
//! [`row_collision_bound`] bounds the probability that any merge happens at
//! all (binary alphabet).

use crate::error::{Error, Result};
use crate::rng::{tag, Stream};
use std::collections::HashMap;

/// Symbols are the integers `0..size`. Sizes are capped at 255 so the
/// erasure mark ([`crate::channel::ERASURE`]) stays representable in a byte.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if !(2..=255).contains(&size) {
            return Err(Error::InvalidAlphabet(format!(
                "size must be in 2..=255, got {size}"
            )));
        }
        Ok(Alphabet { size })
    }

    pub fn binary() -> Self {
        Alphabet { size: 2 }
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// A partition of `0..len` into labeled clusters. Labels are `0..r` and
/// every label occurs. Generated instances use contiguous label blocks, but
/// nothing downstream relies on contiguity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<u32>,
    cluster_sizes: Vec<u32>,
}

impl Partition {
    /// Equal-size contiguous clusters. `cluster_size` must divide `dim`.
    pub fn uniform(dim: usize, cluster_size: usize) -> Result<Self> {
        if cluster_size == 0 || dim == 0 {
            return Err(Error::InvalidPartition(format!(
                "dimension {dim} and cluster size {cluster_size} must be positive"
            )));
        }
        if !dim.is_multiple_of(cluster_size) {
            return Err(Error::InvalidPartition(format!(
                "cluster size {cluster_size} does not divide dimension {dim}"
            )));
        }
        let r = dim / cluster_size;
        let assignment = (0..dim).map(|i| (i / cluster_size) as u32).collect();
        Ok(Partition {
            assignment,
            cluster_sizes: vec![cluster_size as u32; r],
        })
    }

    /// Contiguous clusters with explicit sizes, in order.
    pub fn from_sizes(sizes: &[u32]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidPartition(
                "cluster sizes must be nonempty and positive".into(),
            ));
        }
        let mut assignment = Vec::with_capacity(sizes.iter().map(|&s| s as usize).sum());
        for (label, &size) in sizes.iter().enumerate() {
            assignment.extend(std::iter::repeat_n(label as u32, size as usize));
        }
        Ok(Partition {
            assignment,
            cluster_sizes: sizes.to_vec(),
        })
    }

    /// An arbitrary assignment. Every label in `0..max+1` must occur.
    pub fn from_assignment(assignment: Vec<u32>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidPartition("empty assignment".into()));
        }
        let r = *assignment.iter().max().unwrap() as usize + 1;
        let mut cluster_sizes = vec![0u32; r];
        for &label in &assignment {
            cluster_sizes[label as usize] += 1;
        }
        if cluster_sizes.contains(&0) {
            return Err(Error::InvalidPartition(
                "labels must cover 0..r with no gaps".into(),
            ));
        }
        Ok(Partition {
            assignment,
            cluster_sizes,
        })
    }

    /// Relabels arbitrary raw labels canonically, in order of first
    /// occurrence.
    pub(crate) fn canonicalize(raw: &[u32]) -> Self {
        let mut map: HashMap<u32, u32> = HashMap::new();
        let mut assignment = Vec::with_capacity(raw.len());
        let mut cluster_sizes = Vec::new();
        for &label in raw {
            let next = map.len() as u32;
            let canon = *map.entry(label).or_insert(next);
            if canon == cluster_sizes.len() as u32 {
                cluster_sizes.push(0);
            }
            cluster_sizes[canon as usize] += 1;
            assignment.push(canon);
        }
        Partition {
            assignment,
            cluster_sizes,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn num_clusters(&self) -> usize {
        self.cluster_sizes.len()
    }

    #[inline]
    pub fn label(&self, index: usize) -> u32 {
        self.assignment[index]
    }

    pub fn labels(&self) -> &[u32] {
        &self.assignment
    }

    pub fn cluster_sizes(&self) -> &[u32] {
        &self.cluster_sizes
    }

    /// True iff `a` and `b` are in the same cluster.
    #[inline]
    pub fn same_cluster(&self, a: usize, b: usize) -> bool {
        self.assignment[a] == self.assignment[b]
    }
}

/// A ground-truth instance: partitions, per-block values, and the filled
/// matrix (row-major, `rows x cols`).
#[derive(Clone, Debug)]
pub struct RatingInstance {
    pub row_partition: Partition,
    pub col_partition: Partition,
    pub alphabet: Alphabet,
    /// `r x t` block values, row-major.
    pub cluster_values: Vec<u8>,
    /// `rows x cols` filled matrix, row-major.
    pub matrix: Vec<u8>,
}

impl RatingInstance {
    pub fn rows(&self) -> usize {
        self.row_partition.len()
    }

    pub fn cols(&self) -> usize {
        self.col_partition.len()
    }

    #[inline]
    pub fn value(&self, row_cluster: u32, col_cluster: u32) -> u8 {
        self.cluster_values[row_cluster as usize * self.col_partition.num_clusters()
            + col_cluster as usize]
    }
}

/// Draws the `r x t` block values i.i.d. uniform over the alphabet and fills
/// the matrix. Pure in `(partitions, alphabet, seed)`: the value stream is
/// keyed by the seed and consumed in row-major block order.
pub fn generate_instance(
    row_partition: &Partition,
    col_partition: &Partition,
    alphabet: Alphabet,
    seed: u64,
) -> RatingInstance {
    let r = row_partition.num_clusters();
    let t = col_partition.num_clusters();
    let mut stream = Stream::keyed(seed, tag::CLUSTER_VALUES, 0, 0);
    let cluster_values: Vec<u8> = (0..r * t)
        .map(|_| stream.next_below(alphabet.size() as u64) as u8)
        .collect();

    let rows = row_partition.len();
    let cols = col_partition.len();
    let mut matrix = vec![0u8; rows * cols];
    for a in 0..rows {
        let base = row_partition.label(a) as usize * t;
        let out = &mut matrix[a * cols..(a + 1) * cols];
        for (b, slot) in out.iter_mut().enumerate() {
            *slot = cluster_values[base + col_partition.label(b) as usize];
        }
    }

    RatingInstance {
        row_partition: row_partition.clone(),
        col_partition: col_partition.clone(),
        alphabet,
        cluster_values,
        matrix,
    }
}

/// Cluster structure of an instance after merging clusters whose value
/// vectors coincide, with the extreme block areas of the merged structure.
#[derive(Clone, Debug)]
pub struct EffectiveClusterStats {
    /// Smallest merged block area (`s_*`).
    pub min_area: u64,
    /// Largest merged block area (`s^*`).
    pub max_area: u64,
    pub merged_rows: Partition,
    pub merged_cols: Partition,
}

impl EffectiveClusterStats {
    /// True iff merging changed either partition.
    pub fn any_merge(&self, instance: &RatingInstance) -> bool {
        self.merged_rows.num_clusters() < instance.row_partition.num_clusters()
            || self.merged_cols.num_clusters() < instance.col_partition.num_clusters()
    }
}

/// Merges row clusters with identical value rows (and likewise columns).
/// Value equality is an equivalence relation, so grouping by the full value
/// vector is already the transitive closure.
pub fn effective_stats(instance: &RatingInstance) -> EffectiveClusterStats {
    let r = instance.row_partition.num_clusters();
    let t = instance.col_partition.num_clusters();

    let row_group = group_identical(r, |i| instance.cluster_values[i * t..(i + 1) * t].to_vec());
    let col_group = group_identical(t, |j| {
        (0..r).map(|i| instance.cluster_values[i * t + j]).collect()
    });

    let merged_rows = merge_partition(&instance.row_partition, &row_group);
    let merged_cols = merge_partition(&instance.col_partition, &col_group);

    let mut min_area = u64::MAX;
    let mut max_area = 0u64;
    for &mi in merged_rows.cluster_sizes() {
        for &nj in merged_cols.cluster_sizes() {
            let area = mi as u64 * nj as u64;
            min_area = min_area.min(area);
            max_area = max_area.max(area);
        }
    }

    EffectiveClusterStats {
        min_area,
        max_area,
        merged_rows,
        merged_cols,
    }
}

/// Maps each of `count` keys to a group label shared by identical keys.
fn group_identical<F: Fn(usize) -> Vec<u8>>(count: usize, key: F) -> Vec<u32> {
    let mut groups: HashMap<Vec<u8>, u32> = HashMap::new();
    let mut labels = Vec::with_capacity(count);
    for i in 0..count {
        let next = groups.len() as u32;
        labels.push(*groups.entry(key(i)).or_insert(next));
    }
    labels
}

fn merge_partition(original: &Partition, cluster_to_group: &[u32]) -> Partition {
    let raw: Vec<u32> = original
        .labels()
        .iter()
        .map(|&label| cluster_to_group[label as usize])
        .collect();
    Partition::canonicalize(&raw)
}

/// Upper bound on the probability that two different row clusters of a
/// random binary instance draw identical value rows: `min(1, m^2 / 2^t)`,
/// for an `m`-row matrix with `t` column clusters. The general-alphabet
/// analogue would replace `2^t` by `|A|^t`, but only the binary form is
/// exposed.
pub fn row_collision_bound(m: u64, t: u32) -> f64 {
    if m < 2 {
        return 0.0;
    }
    let log2 = 2.0 * (m as f64).log2() - t as f64;
    if log2 >= 0.0 {
        1.0
    } else {
        log2.exp2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_partition_basic() {
        let p = Partition::uniform(6, 2).unwrap();
        assert_eq!(p.num_clusters(), 3);
        assert_eq!(p.labels(), &[0, 0, 1, 1, 2, 2]);
        assert_eq!(p.cluster_sizes(), &[2, 2, 2]);

        let single = Partition::uniform(4, 4).unwrap();
        assert_eq!(single.num_clusters(), 1);
        assert_eq!(single.cluster_sizes(), &[4]);
    }

    #[test]
    fn uniform_partition_rejects_non_divisible() {
        assert!(Partition::uniform(10, 3).is_err());
        assert!(Partition::uniform(0, 1).is_err());
        assert!(Partition::uniform(4, 0).is_err());
    }

    #[test]
    fn from_assignment_requires_gapless_labels() {
        assert!(Partition::from_assignment(vec![0, 2, 2]).is_err());
        let p = Partition::from_assignment(vec![1, 0, 1]).unwrap();
        assert_eq!(p.cluster_sizes(), &[1, 2]);
    }

    #[test]
    fn generation_is_deterministic() {
        let rows = Partition::uniform(12, 3).unwrap();
        let cols = Partition::uniform(8, 2).unwrap();
        let a = generate_instance(&rows, &cols, Alphabet::binary(), 7);
        let b = generate_instance(&rows, &cols, Alphabet::binary(), 7);
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.cluster_values, b.cluster_values);
        let c = generate_instance(&rows, &cols, Alphabet::binary(), 8);
        assert_ne!(a.matrix, c.matrix);
    }

    #[test]
    fn matrix_is_block_constant() {
        let rows = Partition::from_sizes(&[2, 3, 1]).unwrap();
        let cols = Partition::from_sizes(&[1, 4]).unwrap();
        let inst = generate_instance(&rows, &cols, Alphabet::new(4).unwrap(), 99);
        for a in 0..inst.rows() {
            for b in 0..inst.cols() {
                let expect = inst.value(rows.label(a), cols.label(b));
                assert_eq!(inst.matrix[a * inst.cols() + b], expect);
            }
        }
    }

    #[test]
    fn binary_values_are_balanced() {
        // r = t = 100: fraction of ones among the 10^4 block values within
        // 3 sigma of 1/2 (sigma = 0.005).
        let rows = Partition::uniform(100, 1).unwrap();
        let cols = Partition::uniform(100, 1).unwrap();
        let inst = generate_instance(&rows, &cols, Alphabet::binary(), 2024);
        let ones: u64 = inst.cluster_values.iter().map(|&v| v as u64).sum();
        let frac = ones as f64 / 10_000.0;
        assert!((0.485..=0.515).contains(&frac), "fraction of ones {frac}");
    }

    #[test]
    fn quaternary_values_are_balanced() {
        let rows = Partition::uniform(100, 1).unwrap();
        let cols = Partition::uniform(100, 1).unwrap();
        let inst = generate_instance(&rows, &cols, Alphabet::new(4).unwrap(), 555);
        let mut counts = [0u64; 4];
        for &v in &inst.cluster_values {
            counts[v as usize] += 1;
        }
        // 3 sigma multinomial band: 0.25 +- 3*sqrt(0.25*0.75/10^4).
        for (symbol, &c) in counts.iter().enumerate() {
            let frac = c as f64 / 10_000.0;
            assert!(
                (frac - 0.25).abs() <= 0.013,
                "symbol {symbol} frequency {frac}"
            );
        }
    }

    #[test]
    fn effective_stats_without_merge() {
        // Distinct value rows/columns: extreme areas are just the extreme
        // products of the original cluster sizes.
        let rows = Partition::from_sizes(&[2, 3]).unwrap();
        let cols = Partition::from_sizes(&[1, 4]).unwrap();
        let mut inst = generate_instance(&rows, &cols, Alphabet::binary(), 1);
        inst.cluster_values = vec![0, 1, 1, 0]; // distinct rows, distinct cols
        let stats = effective_stats(&inst);
        assert!(!stats.any_merge(&inst));
        assert_eq!(stats.min_area, 2);
        assert_eq!(stats.max_area, 12);
    }

    #[test]
    fn effective_stats_merges_identical_value_rows() {
        // Uniform 2x2 clusters of size 2, with both row clusters drawing the
        // same value row: merged row cluster has size 4, so the largest
        // merged block area is 4 * 2 = 8.
        let rows = Partition::uniform(4, 2).unwrap();
        let cols = Partition::uniform(4, 2).unwrap();
        let mut inst = generate_instance(&rows, &cols, Alphabet::binary(), 1);
        inst.cluster_values = vec![0, 1, 0, 1];
        for a in 0..4 {
            for b in 0..4 {
                inst.matrix[a * 4 + b] = inst.value(rows.label(a), cols.label(b));
            }
        }
        let stats = effective_stats(&inst);
        assert!(stats.any_merge(&inst));
        assert_eq!(stats.merged_rows.num_clusters(), 1);
        assert_eq!(stats.max_area, 8);
        assert_eq!(stats.min_area, 8);
    }

    #[test]
    fn collision_bound_values() {
        let b = row_collision_bound(1024, 30);
        assert!((b - 1.0 / 1024.0).abs() < 1e-15, "bound {b}");
        assert_eq!(row_collision_bound(4, 1), 1.0); // clipped
        // monotone decrease in t for fixed m
        let mut prev = 1.0;
        for t in 3..60 {
            let v = row_collision_bound(2, t);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn merges_are_rare_at_long_value_rows() {
        // m = 1024 rows in 32 clusters, t = 40 column clusters: the collision
        // bound is 2^20 / 2^40 = 2^-20, so no merge should ever be seen in
        // 10^4 instances.
        let rows = Partition::uniform(1024, 32).unwrap();
        let cols = Partition::uniform(40, 1).unwrap();
        let bound = row_collision_bound(1024, 40);
        let trials = 10_000u64;
        let mut merges = 0u64;
        for seed in 0..trials {
            let inst = generate_instance(&rows, &cols, Alphabet::binary(), seed);
            if effective_stats(&inst).any_merge(&inst) {
                merges += 1;
            }
        }
        let freq = merges as f64 / trials as f64;
        let slack = bound + 3.0 * (bound / trials as f64).sqrt();
        assert!(freq <= slack, "merge frequency {freq} above {slack}");
        assert_eq!(merges, 0);
    }
}
