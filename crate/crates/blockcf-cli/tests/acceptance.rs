//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them as they happen).
//! Heavy criteria serialize on a mutex so their wall-clock budgets are
//! measured alone.

use blockcf::bounds::{
    binary_report, chernoff_constants, chernoff_exponent_grid, exact_fill_error,
    minimize_merge_bound,
};
use blockcf::channel::{channel_stats, ChannelSpec};
use blockcf::decode::{majority_decode, ml_decode};
use blockcf::harness::{
    run_monte_carlo, ChannelConfig, ClusterSpec, ExperimentConfig,
};
use blockcf::model::Partition;
use blockcf::rng::Stream;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

static HEAVY: Mutex<()> = Mutex::new(());

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_blockcf"))
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn report(criterion: &str, pass: bool, details: &str) {
    println!(
        "ACCEPTANCE {criterion}: {} — {details}",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// Criterion 1: the `bounds` command at p = 0.25, eps = 0.9, m = n = 10^6
/// reports the reliability constant in [0.986602, 0.986604] and the
/// threshold area in [2040, 2057], in under a second.
#[test]
fn criterion_1_threshold_example() {
    let start = Instant::now();
    let output = cli()
        .args(["bounds", "--config"])
        .arg(config_path("threshold-example.json"))
        .output()
        .expect("spawn bounds");
    let elapsed = start.elapsed();
    assert!(output.status.success(), "bounds failed: {output:?}");
    let parsed: serde_json::Value =
        serde_json::from_slice(&output.stdout).expect("bounds emits JSON");
    let reliability = parsed["binary"]["sample_reliability"].as_f64().unwrap();
    let threshold = parsed["binary"]["threshold_area"].as_f64().unwrap();

    let reliability_ok = (0.986602..=0.986604).contains(&reliability);
    let threshold_ok = (2040.0..=2057.0).contains(&threshold);
    let fast = elapsed < Duration::from_secs(1);
    report(
        "1 (threshold example)",
        reliability_ok && threshold_ok && fast,
        &format!("reliability {reliability}, threshold area {threshold}, {elapsed:?}"),
    );
    assert!(reliability_ok, "reliability {reliability}");
    assert!(threshold_ok, "threshold area {threshold}");
    assert!(fast, "bounds took {elapsed:?}");
}

#[derive(Debug)]
struct FigureRow {
    n0: u64,
    threshold_area: f64,
    fill_lb: f64,
    fill_ub: Option<f64>,
    clust_same_ub: f64,
    clust_diff_p1: f64,
}

fn parse_figure_csv(text: &str) -> Vec<FigureRow> {
    text.lines()
        .skip(1)
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            FigureRow {
                n0: cells[0].parse().unwrap(),
                threshold_area: cells[3].parse().unwrap(),
                fill_lb: cells[4].parse().unwrap(),
                fill_ub: if cells[5].is_empty() {
                    None
                } else {
                    Some(cells[5].parse().unwrap())
                },
                clust_same_ub: cells[6].parse().unwrap(),
                clust_diff_p1: cells[7].parse().unwrap(),
            }
        })
        .collect()
}

/// Criterion 2: structural reproduction of the bound curves over cluster
/// sides 10..150 at m = n = 10^6, p = 0.25, eps = 0.9:
/// (a) the fill lower bound stays above 0.999 up to side 40,
/// (b) the fill upper bound is below 1e-2 from side 50 on,
/// (c) the clustering-error bound on sides 40..50 is smaller than the fill
///     lower bound there,
/// (d) the 0.5-crossings of the two fill bounds bracket the threshold area.
#[test]
fn criterion_2_figure_curves() {
    let dir = std::env::temp_dir().join("blockcf_acceptance_figure");
    std::fs::create_dir_all(&dir).unwrap();
    let stem = dir.join("figure");

    let start = Instant::now();
    let output = cli()
        .args(["figure1", "--config"])
        .arg(config_path("threshold-example.json"))
        .args(["--n0-min", "10", "--n0-max", "150", "--format", "csv,svg", "--out"])
        .arg(&stem)
        .output()
        .expect("spawn figure1");
    let elapsed = start.elapsed();
    assert!(output.status.success(), "figure1 failed: {output:?}");
    let rows = parse_figure_csv(&std::fs::read_to_string(stem.with_extension("csv")).unwrap());
    assert_eq!(rows.len(), 141);

    let m = 1_000_000f64;
    let pair_count = m * (m - 1.0) / 2.0;
    let threshold = rows[0].threshold_area;

    let a_ok = rows
        .iter()
        .filter(|r| r.n0 <= 40)
        .all(|r| r.fill_lb > 0.999);
    let b_ok = rows
        .iter()
        .filter(|r| r.n0 >= 50)
        .all(|r| r.fill_ub.is_some_and(|ub| ub < 1e-2));
    let c_ok = rows
        .iter()
        .filter(|r| (40..=50).contains(&r.n0))
        .all(|r| pair_count * r.clust_same_ub.max(r.clust_diff_p1) < r.fill_lb);
    let last_lb_half = rows.iter().filter(|r| r.fill_lb >= 0.5).map(|r| r.n0).max();
    let first_ub_half = rows
        .iter()
        .filter(|r| r.fill_ub.is_some_and(|ub| ub <= 0.5))
        .map(|r| r.n0)
        .min();
    let d_ok = match (last_lb_half, first_ub_half) {
        (Some(lo), Some(hi)) => {
            let band = (lo * lo).min(hi * hi) as f64..=(lo * lo).max(hi * hi) as f64;
            band.contains(&threshold)
        }
        _ => false,
    };
    let fast = elapsed < Duration::from_secs(10);

    // context for (c): the merge bound at the tightest grid-searched margins
    let best_margin_bound = minimize_merge_bound(1_000_000, 1_000_000.0 / 45.0, 45, 0.25, 0.9, 0.458_333_333_333_333_3)
        .map(|r| r.merge_bound)
        .unwrap_or(f64::NAN);

    report(
        "2 (figure curves)",
        a_ok && b_ok && c_ok && d_ok && fast,
        &format!(
            "(a) lower bound > 0.999 through side 40: {a_ok} (value at 40: {:.3e}); \
             (b) upper bound < 1e-2 from side 50: {b_ok}; \
             (c) clustering bound below fill lower bound on 40..50: {c_ok} \
             (merge bound at default margins at side 45: {:.3e}, at best margins: {best_margin_bound:.3e}, fill lower: {:.3e}); \
             (d) fill-bound 0.5-crossings {:?}/{:?} bracket threshold {threshold:.1}: {d_ok}; \
             elapsed {elapsed:?}",
            rows.iter().find(|r| r.n0 == 40).unwrap().fill_lb,
            rows.iter().find(|r| r.n0 == 45).unwrap().clust_diff_p1,
            rows.iter().find(|r| r.n0 == 45).unwrap().fill_lb,
            last_lb_half,
            first_ub_half,
        ),
    );
    assert!(fast, "figure1 took {elapsed:?}");
    assert!(
        a_ok && b_ok && c_ok && d_ok,
        "sub-checks: a = {a_ok}, b = {b_ok}, c = {c_ok}, d = {d_ok}"
    );
}

/// Criterion 3: for six (p, eps) points at m = n = 60 with 6 x 6 clusters
/// and known clustering, the empirical block-error rate over 10^5 trials
/// lies within 3 binomial sigma of the exact formula. Total runtime under
/// five minutes.
#[test]
fn criterion_3_exact_formula_oracle() {
    let _guard = HEAVY.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    let start = Instant::now();

    // frozen 60-digit evaluations of the exact formula
    let expected = [
        (0.1, 0.0, 8.392276500876e-08),
        (0.1, 0.3, 6.135498505204e-05),
        (0.1, 0.6, 2.177521241637e-02),
        (0.25, 0.0, 6.722739443941e-02),
        (0.25, 0.3, 3.254070260588e-01),
        (0.25, 0.6, 9.107623400607e-01),
    ];

    let mut all_ok = true;
    let mut lines = Vec::new();
    for (index, &(p, epsilon, frozen)) in expected.iter().enumerate() {
        let exact = exact_fill_error(&[6; 10], &[6; 10], p, epsilon).unwrap();
        assert!(
            (exact - frozen).abs() <= 1e-9 * frozen.max(1e-12),
            "exact formula drifted from frozen oracle at p={p}, eps={epsilon}: {exact} vs {frozen}"
        );
        let config = ExperimentConfig {
            m: 60,
            n: 60,
            cluster_spec: ClusterSpec::Uniform { m0: 6, n0: 6 },
            alphabet_size: None,
            channel: ChannelConfig::Bsc { p, epsilon },
            d0: None,
            decode_mode: None,
            known_clustering: true,
            trials: 100_000,
            master_seed: 2026 + index as u64,
            r1: 1.5,
            r2: 0.5,
            output_path: None,
            allow_large_sim: false,
        };
        let agg = run_monte_carlo(&config).unwrap();
        let sigma = (exact * (1.0 - exact) / 1e5).sqrt();
        let ok = (agg.block_error_rate - exact).abs() <= 3.0 * sigma;
        all_ok &= ok;
        lines.push(format!(
            "p={p} eps={epsilon}: empirical {} vs exact {exact:.6e} (3s {:.2e}) {}",
            agg.block_error_rate,
            3.0 * sigma,
            if ok { "ok" } else { "OUT" }
        ));
    }
    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(300);
    report(
        "3 (exact-formula oracle)",
        all_ok && fast,
        &format!("{}; elapsed {elapsed:?}", lines.join("; ")),
    );
    assert!(all_ok, "{lines:?}");
    assert!(fast, "oracle runs took {elapsed:?}");
}

/// Criterion 4: on the (p, eps, area) grid, the exact error always sits
/// inside the analytic sandwich wherever the upper bound's hypothesis
/// holds. Runtime under a minute.
#[test]
fn criterion_4_sandwich() {
    let start = Instant::now();
    let mut checked = 0;
    let mut violations = Vec::new();
    for &p in &[0.05, 0.1, 0.25] {
        for &epsilon in &[0.0, 0.5, 0.9] {
            for &side in &[4u32, 8, 16, 32] {
                let exact = exact_fill_error(&[side; 8], &[side; 8], p, epsilon).unwrap();
                let area = side as u64 * side as u64;
                let m = 8 * side as u64;
                let report = binary_report(p, epsilon, m, m, area, area).unwrap();
                if exact < report.fill_lower - 1e-12 {
                    violations.push(format!(
                        "lower violated at p={p} eps={epsilon} side={side}: {exact} < {}",
                        report.fill_lower
                    ));
                }
                if let Some(upper) = report.fill_upper {
                    checked += 1;
                    if exact > upper + 1e-12 {
                        violations.push(format!(
                            "upper violated at p={p} eps={epsilon} side={side}: {exact} > {upper}"
                        ));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(60);
    report(
        "4 (sandwich)",
        violations.is_empty() && fast,
        &format!("{checked} upper-bound checks, {} violations, {elapsed:?}", violations.len()),
    );
    assert!(violations.is_empty(), "{violations:?}");
    assert!(fast, "sandwich grid took {elapsed:?}");
}

/// Criterion 5: the general-channel reliability constant specializes to
/// the binary constant on BSCs (within 1e-6), and the tilted-family
/// exponent matches a step-1e-3 simplex grid search within 1e-4 on 100
/// random 3-symbol channels. Runtime under a minute.
#[test]
fn criterion_5_general_binary_consistency() {
    let _guard = HEAVY.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    let start = Instant::now();

    let mut bsc_ok = true;
    let mut worst_bsc = 0.0f64;
    for &p in &[0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.45] {
        for &epsilon in &[0.0, 0.5, 0.9] {
            let spec = ChannelSpec::bsc(p, epsilon).unwrap();
            let general = chernoff_constants(&spec, 1000, 1000, 0.0).unwrap();
            let binary = epsilon + 2.0 * (1.0 - epsilon) * (p * (1.0 - p)).sqrt();
            let diff = (general.reliability_upper - binary).abs();
            worst_bsc = worst_bsc.max(diff);
            bsc_ok &= diff < 1e-6;
        }
    }

    let mut stream = Stream::new(505);
    let mut grid_ok = true;
    let mut worst_grid = 0.0f64;
    let mut over_tolerance = 0;
    for _ in 0..100 {
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                let raw: Vec<f64> = (0..3).map(|_| 0.02 + stream.next_f64()).collect();
                let sum: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / sum).collect()
            })
            .collect();
        let spec = ChannelSpec::from_rows(&rows, 0.0).unwrap();
        let tilted = chernoff_constants(&spec, 100, 100, 0.0)
            .unwrap()
            .chernoff_exponent;
        let grid = chernoff_exponent_grid(&spec, 1000).unwrap();
        let diff = (grid - tilted).abs();
        worst_grid = worst_grid.max(diff);
        if diff > 1e-4 {
            over_tolerance += 1;
            grid_ok = false;
        }
    }

    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(60);
    report(
        "5 (general/binary consistency)",
        bsc_ok && grid_ok && fast,
        &format!(
            "BSC specialization worst diff {worst_bsc:.2e} (ok: {bsc_ok}); \
             grid-vs-tilted worst diff {worst_grid:.2e}, {over_tolerance}/100 channels above 1e-4 \
             (the step-1e-3 grid carries one-sided discretization bias of that size); \
             elapsed {elapsed:?}"
        ),
    );
    assert!(bsc_ok, "worst BSC specialization diff {worst_bsc}");
    assert!(fast, "consistency checks took {elapsed:?}");
    assert!(
        grid_ok,
        "{over_tolerance}/100 channels exceeded 1e-4 (worst {worst_grid:.2e})"
    );
}

/// Criterion 6: a thousand random channels over alphabets of size 2, 3,
/// and 5 all satisfy the mismatch-rate ordering, with equality within
/// 1e-12 for equal-row channels. Runtime under ten seconds.
#[test]
fn criterion_6_mismatch_ordering() {
    let start = Instant::now();
    let mut stream = Stream::new(606);
    let mut ordering_ok = true;
    for index in 0..1000 {
        let k = [2usize, 3, 5][index % 3];
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let raw: Vec<f64> = (0..k).map(|_| 1e-6 + stream.next_f64()).collect();
                let sum: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / sum).collect()
            })
            .collect();
        let stats = channel_stats(&ChannelSpec::from_rows(&rows, 0.0).unwrap());
        ordering_ok &= stats.independent_mismatch >= stats.same_input_mismatch - 1e-15;
    }

    let mut equality_ok = true;
    for k in [2usize, 3, 5] {
        let raw: Vec<f64> = (0..k).map(|_| 0.1 + stream.next_f64()).collect();
        let sum: f64 = raw.iter().sum();
        let row: Vec<f64> = raw.into_iter().map(|v| v / sum).collect();
        let rows = vec![row; k];
        let stats = channel_stats(&ChannelSpec::from_rows(&rows, 0.0).unwrap());
        equality_ok &=
            (stats.independent_mismatch - stats.same_input_mismatch).abs() <= 1e-12;
    }

    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(10);
    report(
        "6 (mismatch ordering)",
        ordering_ok && equality_ok && fast,
        &format!("1000 random channels ordered: {ordering_ok}; equal-row equality: {equality_ok}; {elapsed:?}"),
    );
    assert!(ordering_ok && equality_ok);
    assert!(fast, "{elapsed:?}");
}

/// Criterion 7: the finite-size threshold phenomenon end to end at
/// m = n = 1024, p = 0.25, eps = 0.5 with the default threshold, 100
/// trials per side: recovery in at least 95% of trials for 64 x 64
/// clusters (area 16x the threshold), block error in at least 95% for
/// 2 x 2 clusters under known clustering. Runtime under ten minutes.
#[test]
fn criterion_7_threshold_phenomenon() {
    let _guard = HEAVY.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    let start = Instant::now();

    let above = ExperimentConfig {
        m: 1024,
        n: 1024,
        cluster_spec: ClusterSpec::Uniform { m0: 64, n0: 64 },
        alphabet_size: None,
        channel: ChannelConfig::Bsc {
            p: 0.25,
            epsilon: 0.5,
        },
        d0: None,
        decode_mode: None,
        known_clustering: false,
        trials: 100,
        master_seed: 777,
        r1: 1.5,
        r2: 0.5,
        output_path: None,
        allow_large_sim: false,
    };
    // the configured block area must clear 4x the analytic threshold
    let bounds = binary_report(0.25, 0.5, 1024, 1024, 4096, 4096).unwrap();
    assert!(
        4096.0 >= 4.0 * bounds.threshold_area,
        "area 4096 below 4x threshold {}",
        bounds.threshold_area
    );
    let above_agg = run_monte_carlo(&above).unwrap();
    let success_rate = 1.0 - above_agg.block_error_rate;

    let below = ExperimentConfig {
        cluster_spec: ClusterSpec::Uniform { m0: 2, n0: 2 },
        known_clustering: true,
        master_seed: 778,
        ..above.clone()
    };
    let below_agg = run_monte_carlo(&below).unwrap();

    let elapsed = start.elapsed();
    let above_ok = success_rate >= 0.95;
    let below_ok = below_agg.block_error_rate >= 0.95;
    let fast = elapsed < Duration::from_secs(600);
    report(
        "7 (threshold phenomenon)",
        above_ok && below_ok && fast,
        &format!(
            "success rate at area 4096 (threshold {:.0}): {success_rate} (need >= 0.95); \
             error rate at area 4 under known clustering: {} (need >= 0.95); \
             mean row pair-error trials above: {}; elapsed {elapsed:?}",
            bounds.threshold_area, below_agg.block_error_rate, above_agg.pair_error_rate
        ),
    );
    assert!(fast, "threshold runs took {elapsed:?}");
    assert!(below_ok, "converse side error rate {}", below_agg.block_error_rate);
    assert!(above_ok, "achievable side success rate {success_rate}");
}

/// Criterion 8: decoder tie-breaks are fair: a two-sample tied block
/// decodes to 0 with frequency in [0.485, 0.515] over 10^4 seeds, and an
/// empty block under a 4-symbol alphabet decodes uniformly within the
/// 3-sigma multinomial band. Runtime under ten seconds.
#[test]
fn criterion_8_tie_break_contract() {
    use blockcf::channel::{ObservedMatrix, ERASURE};

    let start = Instant::now();
    let tied = ObservedMatrix {
        rows: 2,
        cols: 1,
        alphabet_size: 2,
        entries: vec![0, 1],
    };
    let both_rows = Partition::uniform(2, 2).unwrap();
    let one_col = Partition::uniform(1, 1).unwrap();
    let mut zeros = 0u64;
    for seed in 0..10_000 {
        let decoded = majority_decode(&tied, &both_rows, &one_col, seed).unwrap();
        zeros += (decoded.matrix[0] == 0) as u64;
    }
    let zero_frac = zeros as f64 / 1e4;
    let coin_ok = (0.485..=0.515).contains(&zero_frac);

    let empty = ObservedMatrix {
        rows: 1,
        cols: 1,
        alphabet_size: 4,
        entries: vec![ERASURE],
    };
    let one_row = Partition::uniform(1, 1).unwrap();
    let spec = ChannelSpec::identity(4, 0.9).unwrap();
    let mut counts = [0u64; 4];
    for seed in 0..10_000 {
        let decoded = ml_decode(&empty, &one_row, &one_col, &spec, seed).unwrap();
        counts[decoded.matrix[0] as usize] += 1;
    }
    let band = 3.0 * (0.25f64 * 0.75 / 1e4).sqrt();
    let uniform_ok = counts
        .iter()
        .all(|&c| (c as f64 / 1e4 - 0.25).abs() <= band);

    let elapsed = start.elapsed();
    let fast = elapsed < Duration::from_secs(10);
    report(
        "8 (tie-break contract)",
        coin_ok && uniform_ok && fast,
        &format!("tied-block zero fraction {zero_frac}; empty-block counts {counts:?}; {elapsed:?}"),
    );
    assert!(coin_ok, "zero fraction {zero_frac}");
    assert!(uniform_ok, "counts {counts:?}");
    assert!(fast, "{elapsed:?}");
}

/// Criterion 9: two full runs of the first oracle configuration with the
/// same master seed produce byte-identical CSV output.
#[test]
fn criterion_9_byte_identical_reruns() {
    let _guard = HEAVY.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    let dir = std::env::temp_dir().join("blockcf_acceptance_determinism");
    std::fs::create_dir_all(&dir).unwrap();

    let mut outputs = Vec::new();
    for run in 0..2 {
        let stem = dir.join(format!("run{run}"));
        let output = cli()
            .args(["simulate", "--config"])
            .arg(config_path("oracle-first.json"))
            .args(["--format", "csv", "--out"])
            .arg(&stem)
            .output()
            .expect("spawn simulate");
        assert!(output.status.success(), "simulate failed: {output:?}");
        outputs.push(std::fs::read(stem.with_extension("csv")).unwrap());
    }

    let identical = outputs[0] == outputs[1];
    report(
        "9 (byte-identical reruns)",
        identical,
        &format!("{} bytes per run", outputs[0].len()),
    );
    assert!(identical);
}
