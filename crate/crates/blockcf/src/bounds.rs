//! Closed-form and numerically optimized error quantities: the per-sample
//! reliability constant and cluster-area recovery threshold, exact
//! fill-error of the majority decoder under known clustering, the
//! fill-error sandwich bounds, clustering-error bounds, weighted Hoeffding
//! bounds, and Chernoff exponents for general channels.
//!
//! Products over thousands of blocks and powers like `reliability^area` are
//! kept in log domain throughout; probabilities that sit next to 1 are
//! produced through `expm1` so their distance to 1 survives in the exposed
//! exponent fields.

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// Largest block area accepted by [`exact_fill_error`]; the formula costs
/// O(area^2) per distinct block shape.
pub const MAX_EXACT_AREA: u64 = 1_000_000;

/// KL divergence between Bernoulli(a) and Bernoulli(b) in nats, with the
/// conventions `0 ln 0 = 0` and a divergence of infinity when `b` is 0 or 1
/// and `a` disagrees.
pub fn bernoulli_kl(a: f64, b: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
    fn part(x: f64, y: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else if y == 0.0 {
            f64::INFINITY
        } else {
            x * (x / y).ln()
        }
    }
    part(a, b) + part(1.0 - a, 1.0 - b)
}

/// `1 - exp(-x)` for `x >= 0`, precise for tiny `x`.
#[inline]
fn prob_from_exponent(x: f64) -> f64 {
    -(-x).exp_m1()
}

/// `x * ln(y)` with the `0 ln 0 = 0` convention.
#[inline]
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + terms.iter().map(|&t| (t - max).exp()).sum::<f64>().ln()
}

/// Table of `ln(k!)`, Kahan-summed so values stay accurate to ~1e-12 even
/// at k = 10^6.
struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    fn new(max_n: usize) -> Self {
        let mut table = Vec::with_capacity(max_n + 1);
        table.push(0.0);
        let mut sum = 0.0f64;
        let mut carry = 0.0f64;
        for k in 1..=max_n {
            let term = (k as f64).ln() - carry;
            let next = sum + term;
            carry = (next - sum) - term;
            sum = next;
            table.push(sum);
        }
        LnFactorial { table }
    }

    #[inline]
    fn ln_choose(&self, n: usize, k: usize) -> f64 {
        self.table[n] - self.table[k] - self.table[n - k]
    }
}

/// Probability that a majority vote over `s` i.i.d. BSC(p) samples decides
/// wrongly, with exact ties (even `s`) decided by a fair coin.
fn majority_wrong(s: usize, p: f64, lf: &LnFactorial) -> f64 {
    if s == 0 {
        return 0.5;
    }
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    let mut total = 0.0f64;
    for flips in (s / 2 + 1)..=s {
        let ln_term = lf.ln_choose(s, flips)
            + xlny_ln(flips as f64, ln_p, p)
            + xlny_ln((s - flips) as f64, ln_q, 1.0 - p);
        total += ln_term.exp();
    }
    if s.is_multiple_of(2) {
        let half = s / 2;
        let ln_term = lf.ln_choose(s, half)
            + xlny_ln(half as f64, ln_p, p)
            + xlny_ln(half as f64, ln_q, 1.0 - p);
        total += 0.5 * ln_term.exp();
    }
    total.min(1.0)
}

/// `x * ln_y` where `ln_y` is a precomputed logarithm of `y`, with the
/// `0 * ln 0 = 0` convention.
#[inline]
fn xlny_ln(x: f64, ln_y: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if y == 0.0 {
        f64::NEG_INFINITY
    } else {
        x * ln_y
    }
}

/// Probability that one block of `area` entries is decoded wrongly by the
/// majority rule: the erasure pattern leaves `s ~ Binomial(area, 1-eps)`
/// samples, and the decision over `s` samples errs with [`majority_wrong`].
fn block_wrong(area: usize, p: f64, epsilon: f64, lf: &LnFactorial) -> f64 {
    if epsilon == 0.0 {
        return majority_wrong(area, p, lf);
    }
    if epsilon == 1.0 {
        return 0.5;
    }
    let ln_eps = epsilon.ln();
    let ln_keep = (1.0 - epsilon).ln();
    let mut total = 0.0f64;
    for s in 0..=area {
        let ln_weight =
            lf.ln_choose(area, s) + (area - s) as f64 * ln_eps + s as f64 * ln_keep;
        total += ln_weight.exp() * majority_wrong(s, p, lf);
    }
    total.min(1.0)
}

/// Exact block-error probability of the majority decoder with known
/// clustering: every block must decode correctly, blocks are independent,
/// and the per-block correctness is the binomial double sum over erasure
/// counts and flip counts. Distinct block areas are memoized, so uniform
/// instances cost a single evaluation.
pub fn exact_fill_error(
    row_sizes: &[u32],
    col_sizes: &[u32],
    p: f64,
    epsilon: f64,
) -> Result<f64> {
    if row_sizes.is_empty() || col_sizes.is_empty() {
        return Err(Error::ParamRange("cluster size lists must be nonempty".into()));
    }
    if row_sizes.iter().chain(col_sizes).any(|&s| s == 0) {
        return Err(Error::ParamRange("cluster sizes must be positive".into()));
    }
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::ParamRange(format!("p = {p}, epsilon = {epsilon}")));
    }

    let mut area_counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut max_area = 0u64;
    for &mi in row_sizes {
        for &nj in col_sizes {
            let area = mi as u64 * nj as u64;
            if area > MAX_EXACT_AREA {
                return Err(Error::AreaTooLarge(area));
            }
            max_area = max_area.max(area);
            *area_counts.entry(area).or_insert(0) += 1;
        }
    }

    let lf = LnFactorial::new(max_area as usize);
    let mut ln_all_correct = 0.0f64;
    for (&area, &count) in &area_counts {
        let wrong = block_wrong(area as usize, p, epsilon, &lf);
        let ln_correct = if wrong >= 1.0 {
            f64::NEG_INFINITY
        } else {
            (-wrong).ln_1p()
        };
        ln_all_correct += count as f64 * ln_correct;
        if ln_all_correct == f64::NEG_INFINITY {
            return Ok(1.0);
        }
    }
    Ok(prob_from_exponent(-ln_all_correct))
}

/// Reliability constant, recovery threshold, and the fill-error sandwich
/// bounds for binary data with uniform-law block values.
#[derive(Clone, Debug, Serialize)]
pub struct BinaryBoundsReport {
    /// Per-sample reliability `eps + 2(1-eps) sqrt(p(1-p))`; per-block
    /// correctness decays like its `area`-th power.
    pub sample_reliability: f64,
    /// `ln(mn) / ln(1/reliability)`: block areas above it allow recovery,
    /// areas below it defeat every estimator as the matrix grows.
    pub threshold_area: f64,
    /// Output mismatch probability for two observations of equal inputs.
    pub same_mismatch: f64,
    /// Complement of `same_mismatch`.
    pub diff_mismatch: f64,
    /// Lower bound on the block-error probability, evaluated at the largest
    /// block area.
    pub fill_lower: f64,
    pub fill_lower_exponent: f64,
    /// Upper bound evaluated at the smallest block area; `None` when the
    /// hypothesis `min area >= ln 2 / ln(1/reliability)` fails, rather than
    /// silently reporting an inapplicable number.
    pub fill_upper: Option<f64>,
    pub fill_upper_exponent: Option<f64>,
}

pub fn binary_report(
    p: f64,
    epsilon: f64,
    m: u64,
    n: u64,
    s_low: u64,
    s_star: u64,
) -> Result<BinaryBoundsReport> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::ParamRange(format!("p must lie in [0, 0.5), got {p}")));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::ParamRange(format!(
            "epsilon must lie in [0, 1), got {epsilon}"
        )));
    }
    if m == 0 || n == 0 || (m as u128) * (n as u128) < 2 {
        return Err(Error::ParamRange(format!("matrix {m} x {n} too small")));
    }
    if s_low == 0 || s_low > s_star {
        return Err(Error::ParamRange(format!(
            "need 1 <= s_low <= s_star, got {s_low}, {s_star}"
        )));
    }

    let reliability = epsilon + 2.0 * (1.0 - epsilon) * (p * (1.0 - p)).sqrt();
    let ln_mn = (m as f64 * n as f64).ln();
    let threshold_area = if reliability == 0.0 {
        0.0
    } else {
        ln_mn / -reliability.ln()
    };

    let ln_rel = reliability.ln(); // -inf when reliability == 0
    let lower_exponent = if p == 0.0 {
        0.0
    } else {
        0.25 * (p / (1.0 - p)).sqrt()
            * (ln_mn + s_star as f64 * ln_rel
                - (s_star as f64).ln()
                - (s_star as f64 + 1.0).ln())
            .exp()
    };

    let hypothesis_ok =
        reliability == 0.0 || s_low as f64 * -ln_rel >= std::f64::consts::LN_2;
    let (fill_upper, fill_upper_exponent) = if hypothesis_ok {
        let x = if reliability == 0.0 {
            0.0
        } else {
            2.0 * std::f64::consts::LN_2
                * (ln_mn + s_low as f64 * ln_rel - (s_low as f64).ln()).exp()
        };
        (Some(prob_from_exponent(x)), Some(x))
    } else {
        (None, None)
    };

    let same_mismatch = 2.0 * p * (1.0 - p);
    Ok(BinaryBoundsReport {
        sample_reliability: reliability,
        threshold_area,
        same_mismatch,
        diff_mismatch: 1.0 - same_mismatch,
        fill_lower: prob_from_exponent(lower_exponent),
        fill_lower_exponent: lower_exponent,
        fill_upper,
        fill_upper_exponent,
    })
}

/// Smaller root of the Chernoff tilt quadratic
/// `2 mu nu (1-d0) h^2 + (2 d0 - 2 mu nu - 1) h + (1 - 2 d0) = 0`,
/// the tilt minimizing the merge-probability bound in the balanced case.
/// Requires `mu < d0 < mu + 1/2`; for `d0 <= 1/2` the smaller root lies in
/// `[0, 1)`, while `d0 > 1/2` pushes it negative (no valid tilt) and is
/// rejected. The returned root's substitution residual is below 1e-12.
pub fn solve_optimal_tilt(mu: f64, nu: f64, d0: f64) -> Result<f64> {
    if (mu + nu - 1.0).abs() > 1e-9 {
        return Err(Error::ParamRange(format!("mu = {mu} and nu = {nu} must sum to 1")));
    }
    if !(d0 > mu && d0 < mu + 0.5) {
        return Err(Error::ParamRange(format!(
            "threshold {d0} outside (mu, mu + 1/2) = ({mu}, {})",
            mu + 0.5
        )));
    }
    let a = 2.0 * mu * nu * (1.0 - d0);
    let b = 2.0 * d0 - 2.0 * mu * nu - 1.0;
    let c = 1.0 - 2.0 * d0;
    if a == 0.0 {
        return Err(Error::ParamRange(format!(
            "tilt quadratic degenerates at mu = {mu}, d0 = {d0}"
        )));
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(Error::ParamRange(format!(
            "tilt quadratic has no real root at mu = {mu}, d0 = {d0}"
        )));
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let root = if q == 0.0 {
        0.0
    } else {
        (q / a).min(c / q)
    };
    let residual = (a * root * root + b * root + c).abs();
    if residual >= 1e-12 {
        return Err(Error::ParamRange(format!(
            "tilt root residual {residual} exceeds 1e-12"
        )));
    }
    if !(0.0..1.0).contains(&root) {
        return Err(Error::ParamRange(format!(
            "optimal tilt {root} outside [0, 1); thresholds above 1/2 are not usable"
        )));
    }
    Ok(root)
}

/// Clustering-error bounds for one axis: `n` positions per item, `t` value
/// clusters along the axis (real-valued so non-divisible sweep sizes keep a
/// consistent meaning), clusters of size `n0`, and concentration margins
/// `r1 > 1`, `r2 in (0, 1)` for the common-sample count.
#[derive(Clone, Debug, Serialize)]
pub struct ClusteringBoundReport {
    /// Minimizing tilt of the merge bound.
    pub optimal_tilt: f64,
    /// Exponent for the upper tail of the common-sample count; infinite
    /// when the margin exceeds the count's hard maximum (no erasures).
    pub count_upper_exponent: f64,
    /// Exponent for the lower tail of the common-sample count.
    pub count_lower_exponent: f64,
    /// Moment factor of the per-value-cluster agreement draw.
    pub agreement_factor: f64,
    /// Moment factor of the value-collision tail.
    pub collision_factor: f64,
    /// Bound on P(declared different | same cluster).
    pub split_bound: f64,
    pub split_bound_ln: f64,
    /// Bound on P(declared same | different clusters); can exceed 1 when
    /// vacuous at the given margins.
    pub merge_bound: f64,
    pub merge_bound_ln: f64,
    pub count_margin_upper: f64,
    pub count_margin_lower: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn clustering_bound(
    n: u64,
    t: f64,
    n0: u64,
    p: f64,
    epsilon: f64,
    d0: f64,
    r1: f64,
    r2: f64,
) -> Result<ClusteringBoundReport> {
    if n == 0 || n0 == 0 || t <= 0.0 {
        return Err(Error::ParamRange(format!("n = {n}, t = {t}, n0 = {n0}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParamRange(format!("p = {p}")));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::ParamRange(format!(
            "epsilon must lie in [0, 1), got {epsilon}"
        )));
    }
    if r1 <= 1.0 {
        return Err(Error::ParamRange(format!("r1 must exceed 1, got {r1}")));
    }
    if !(0.0..1.0).contains(&r2) || r2 == 0.0 {
        return Err(Error::ParamRange(format!("r2 must lie in (0, 1), got {r2}")));
    }

    let mu = 2.0 * p * (1.0 - p);
    let nu = 1.0 - mu;
    let seen = (1.0 - epsilon) * (1.0 - epsilon);

    // margin above the count's hard maximum: the tail is empty
    let count_upper_exponent = if r1 * seen > 1.0 {
        f64::INFINITY
    } else {
        bernoulli_kl(r1 * seen, seen)
    };
    let count_lower_exponent = bernoulli_kl(r2 * seen, seen);

    let tilt = solve_optimal_tilt(mu, nu, d0)?;
    let ln_growth = (-mu * tilt).ln_1p() - d0 * (-tilt).ln_1p();
    let ln_ratio = (-nu * tilt).ln_1p() - (-mu * tilt).ln_1p();

    let n0f = n0 as f64;
    let agreement_factor = 0.5 * (1.0 + (n0f * r2 * seen * ln_ratio).exp());
    let collision_factor = 0.5 * (1.0 + (-n0f * count_lower_exponent).exp2());

    let nf = n as f64;
    let split_bound_ln = -nf * (r2 * seen * bernoulli_kl(d0, mu)).min(count_lower_exponent);
    let merge_terms = [
        nf * r1 * seen * ln_growth + t * agreement_factor.ln(),
        -count_upper_exponent * nf,
        t * collision_factor.ln(),
    ];
    let merge_bound_ln = log_sum_exp(&merge_terms);

    Ok(ClusteringBoundReport {
        optimal_tilt: tilt,
        count_upper_exponent,
        count_lower_exponent,
        agreement_factor,
        collision_factor,
        split_bound: split_bound_ln.exp(),
        split_bound_ln,
        merge_bound: merge_bound_ln.exp(),
        merge_bound_ln,
        count_margin_upper: r1,
        count_margin_lower: r2,
    })
}

/// Coarse grid search over the concentration margins (`r1` in (1, 3] and
/// `r2` in (0, 1), step 0.05) minimizing the merge bound. The best margins
/// are reported inside the returned bound.
pub fn minimize_merge_bound(
    n: u64,
    t: f64,
    n0: u64,
    p: f64,
    epsilon: f64,
    d0: f64,
) -> Result<ClusteringBoundReport> {
    let mut best: Option<ClusteringBoundReport> = None;
    for i in 1..=40u32 {
        let r1 = 1.0 + 0.05 * i as f64;
        for j in 1..=19u32 {
            let r2 = 0.05 * j as f64;
            let report = clustering_bound(n, t, n0, p, epsilon, d0, r1, r2)?;
            if best
                .as_ref()
                .is_none_or(|b| report.merge_bound_ln < b.merge_bound_ln)
            {
                best = Some(report);
            }
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// Hoeffding bound for a weighted mean of i.i.d. [0, 1] variables: with
/// weights `w_i` summing to `w`, the probability that the mean deviates
/// from its expectation `mu` past `d0` is at most
/// `exp(-2 (d0 - mu)^2 w^2 / sum w_i^2)` (either tail).
pub fn weighted_hoeffding(d0: f64, mu: f64, weights: &[u64]) -> Result<f64> {
    if weights.is_empty() || weights.contains(&0) {
        return Err(Error::ParamRange(
            "weights must be nonempty and positive".into(),
        ));
    }
    let total: f64 = weights.iter().map(|&w| w as f64).sum();
    let sum_sq: f64 = weights.iter().map(|&w| (w as f64) * (w as f64)).sum();
    Ok((-2.0 * (d0 - mu) * (d0 - mu) * total * total / sum_sq).exp())
}

/// Worst-pair Chernoff exponent of a channel and the derived reliability
/// constants and recovery thresholds for general alphabets.
#[derive(Clone, Debug, Serialize)]
pub struct GeneralChannelConstants {
    /// Worst-pair Chernoff exponent; zero for a channel with two identical
    /// rows, infinite when some pair of rows has disjoint support.
    pub chernoff_exponent: f64,
    /// True when two rows coincide, making recovery impossible.
    pub degenerate: bool,
    pub delta: f64,
    /// `eps + (1-eps) exp(-C + delta)`, the reliability constant on the
    /// achievability side.
    pub reliability_upper: f64,
    /// `eps + (1-eps) exp(-C - delta)`, the constant on the converse side.
    pub reliability_lower: f64,
    /// `ln(mn) / ln(1/reliability_upper)`.
    pub threshold_area_achievable: f64,
    /// `ln(mn) / ln(1/reliability_lower)`.
    pub threshold_area_converse: f64,
}

/// Chernoff exponent of one ordered row pair via the tilted family:
/// minimizes `g(l) = ln sum_y qa(y)^(1-l) qb(y)^l` over `l in [0, 1]` by
/// golden-section (the function is convex) and returns `-g(l*)`.
fn pair_chernoff(qa: &[f64], qb: &[f64]) -> f64 {
    if qa
        .iter()
        .zip(qb)
        .all(|(&x, &y)| (x - y).abs() <= 1e-12)
    {
        return 0.0;
    }
    let mut ln_a = Vec::new();
    let mut ln_b = Vec::new();
    for (&x, &y) in qa.iter().zip(qb) {
        if x > 0.0 && y > 0.0 {
            ln_a.push(x.ln());
            ln_b.push(y.ln());
        }
    }
    if ln_a.is_empty() {
        return f64::INFINITY; // disjoint supports: perfectly distinguishable
    }
    let g = |lambda: f64| -> f64 {
        let terms: Vec<f64> = ln_a
            .iter()
            .zip(&ln_b)
            .map(|(&la, &lb)| (1.0 - lambda) * la + lambda * lb)
            .collect();
        log_sum_exp(&terms)
    };

    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    while hi - lo > 1e-12 {
        if g1 <= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        }
    }
    // rounding can push g marginally positive for nearly identical rows
    (-g(0.5 * (lo + hi))).max(0.0)
}

pub fn chernoff_constants(
    spec: &ChannelSpec,
    m: u64,
    n: u64,
    delta: f64,
) -> Result<GeneralChannelConstants> {
    if delta < 0.0 {
        return Err(Error::ParamRange(format!("delta must be >= 0, got {delta}")));
    }
    if m == 0 || n == 0 || (m as u128) * (n as u128) < 2 {
        return Err(Error::ParamRange(format!("matrix {m} x {n} too small")));
    }
    let k = spec.alphabet_size();
    let mut exponent = f64::INFINITY;
    let mut degenerate = false;
    for a in 0..k {
        for b in (a + 1)..k {
            let c = pair_chernoff(spec.row(a as u8), spec.row(b as u8));
            if c == 0.0 {
                degenerate = true;
            }
            exponent = exponent.min(c);
        }
    }

    let epsilon = spec.erasure();
    let reliability = |shift: f64| epsilon + (1.0 - epsilon) * (-exponent + shift).exp();
    let upper = reliability(delta);
    let lower = reliability(-delta);
    let ln_mn = (m as f64 * n as f64).ln();
    let threshold = |rel: f64| {
        if rel >= 1.0 {
            f64::INFINITY
        } else if rel <= 0.0 {
            0.0
        } else {
            ln_mn / -rel.ln()
        }
    };

    Ok(GeneralChannelConstants {
        chernoff_exponent: exponent,
        degenerate,
        delta,
        reliability_upper: upper,
        reliability_lower: lower,
        threshold_area_achievable: threshold(upper),
        threshold_area_converse: threshold(lower),
    })
}

/// Brute-force reference for the Chernoff exponent: a dense grid search
/// over the probability simplex with `steps + 1` points per coordinate.
/// For each ordered row pair `(a, b)` it minimizes `D(nu || row_a)` over
/// grid distributions `nu` with `D(nu || row_b) <= D(nu || row_a)`, and
/// returns the overall minimum. Only alphabets of size 2 and 3 are
/// supported; it exists as an independent cross-check for the tilted-family
/// optimization, never as the production path.
pub fn chernoff_exponent_grid(spec: &ChannelSpec, steps: u32) -> Result<f64> {
    use rayon::prelude::*;

    let k = spec.alphabet_size();
    if !(k == 2 || k == 3) {
        return Err(Error::ParamRange(format!(
            "grid reference supports alphabets of size 2 or 3, got {k}"
        )));
    }
    if steps == 0 {
        return Err(Error::ParamRange("steps must be positive".into()));
    }
    let s = steps as usize;
    let ln_rows: Vec<Vec<f64>> = (0..k)
        .map(|a| {
            spec.row(a as u8)
                .iter()
                .map(|&q| if q > 0.0 { q.ln() } else { f64::NEG_INFINITY })
                .collect()
        })
        .collect();

    let divergences = |nu: &[f64]| -> Vec<f64> {
        let nu_ln_nu: f64 = nu.iter().map(|&v| xlny(v, v)).sum();
        ln_rows
            .iter()
            .map(|lr| {
                let cross: f64 = nu
                    .iter()
                    .zip(lr)
                    .map(|(&v, &lq)| {
                        if v == 0.0 {
                            0.0
                        } else if lq == f64::NEG_INFINITY {
                            f64::NEG_INFINITY
                        } else {
                            v * lq
                        }
                    })
                    .sum();
                nu_ln_nu - cross // +inf when some lq is -inf with mass on it
            })
            .collect()
    };

    let best_of = |divs: &[f64]| -> f64 {
        let mut best = f64::INFINITY;
        for a in 0..k {
            for b in 0..k {
                if a != b && divs[b] <= divs[a] {
                    best = best.min(divs[a]);
                }
            }
        }
        best
    };

    let result = (0..=s)
        .into_par_iter()
        .map(|i| {
            let mut local = f64::INFINITY;
            let x = i as f64 / s as f64;
            if k == 2 {
                let nu = [x, 1.0 - x];
                local = local.min(best_of(&divergences(&nu)));
            } else {
                for j in 0..=(s - i) {
                    let y = j as f64 / s as f64;
                    let nu = [x, y, 1.0 - x - y];
                    local = local.min(best_of(&divergences(&nu)));
                }
            }
            local
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(result)
}
