//! Acceptance suite: every release gate in one integration target.
//! Each criterion prints a single `[PASS]`/`[FAIL]` line (visible with
//! `cargo test --test acceptance -- --nocapture`) and asserts.

use lers::oracle::{default_cache_dir, empirical_probabilities};
use lers::{
    binomial_two_sided, bootstrap_ci, child_seed, chi_square_gof, chi_square_two_sample,
    exact_mn_distribution_cached, fit_exponent, records_to_csv, run_sweep, run_verify,
    size_table_from_records, total_variation, tree_frequencies, CubicalComplex, DualGraph,
    FitConvention, LatticeSize, LersSampler, Multigraph, Parallelism, SampleRecord, SampleStatus,
    SizeTable, SweepConfig, TreeSampler, VerifyConfig, DEFAULT_ENUMERATION_CAP,
};
use std::collections::BTreeMap;
use std::sync::LazyLock;
use std::time::{Duration, Instant};

const ALPHA: f64 = 0.01;
const HYPOTHESIS: f64 = 48.0 / 19.0;

fn report(criterion: &str, passed: bool, detail: &str) {
    let tag = if passed { "PASS" } else { "FAIL" };
    println!("[{tag}] {criterion}: {detail}");
    assert!(passed, "{criterion}: {detail}");
}

/// The shared desk sweep: n = 5, 10, ..., 40 with 200 seeded replicates
/// each. Criterion 5 fits it; criterion 7 reads its steps column.
static DESK_SWEEP: LazyLock<(Vec<SampleRecord>, Duration)> = LazyLock::new(|| {
    let started = Instant::now();
    let records = run_sweep(&SweepConfig {
        n_min: 5,
        n_max: 40,
        n_step: 5,
        reps: 200,
        master_seed: 0xDE5C,
        strategy: Parallelism::Default,
    })
    .expect("desk sweep config is valid");
    (records, started.elapsed())
});

#[test]
fn criterion_1_exact_law_at_n1() {
    let started = Instant::now();
    let sampler = LersSampler::new(LatticeSize::new(1).unwrap());
    let total: u64 = 60_000;
    let mut ones = 0u64;
    let mut fives = 0u64;
    let mut sum = 0.0f64;
    for rep in 0..total {
        let sample = sampler.sample(child_seed(0xAC01, 1, rep as u32)).unwrap();
        match sample.size {
            1 => ones += 1,
            5 => fives += 1,
            other => panic!("impossible M_1 value {other}"),
        }
        sum += sample.size as f64;
    }
    let p1 = binomial_two_sided(ones, total, 5.0 / 6.0, ALPHA);
    let p5 = binomial_two_sided(fives, total, 1.0 / 6.0, ALPHA);
    // exact law: mean 5/3, variance 20/9
    let sigma = (20.0 / 9.0 / total as f64).sqrt();
    let mean = sum / total as f64;
    let mean_ok = (mean - 5.0 / 3.0).abs() <= 3.0 * sigma;
    let elapsed = started.elapsed();
    let in_budget = elapsed < Duration::from_secs(10);
    report(
        "criterion 1 (exact law at n=1)",
        p1.passed && p5.passed && mean_ok && in_budget,
        &format!(
            "P(M=1) {:.5} (bound ±{:.5}), P(M=5) {:.5} (bound ±{:.5}), mean {:.5} vs 5/3 ± {:.5}, {:.2?} of 10s budget",
            p1.observed, p1.margin, p5.observed, p5.margin, mean, 3.0 * sigma, elapsed
        ),
    );
}

#[test]
fn criterion_2_oracle_agreement_at_n2() {
    let started = Instant::now();
    let n = LatticeSize::new(2).unwrap();
    let oracle = exact_mn_distribution_cached(n, DEFAULT_ENUMERATION_CAP, &default_cache_dir())
        .expect("n=2 enumeration fits under the default cap");
    let sampler = LersSampler::new(n);
    let total: u64 = 100_000;
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for rep in 0..total {
        let sample = sampler.sample(child_seed(0xAC02, 2, rep as u32)).unwrap();
        *counts.entry(sample.size).or_insert(0) += 1;
    }
    let tv = total_variation(
        &oracle.probabilities_f64(),
        &empirical_probabilities(&counts, total),
    );
    report(
        "criterion 2 (oracle agreement at n=2)",
        tv < 0.01,
        &format!(
            "total variation {tv:.5} over {} trees (tolerance 0.01), {:.2?}",
            oracle.tree_count(),
            started.elapsed()
        ),
    );
}

#[test]
fn criterion_3_structural_invariants() {
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for n in [3u32, 5, 8] {
        let report = run_verify(&VerifyConfig {
            n,
            reps: 1000,
            master_seed: 0xAC03,
            oracle_cap: DEFAULT_ENUMERATION_CAP,
            cache_dir: None,
            alpha: ALPHA,
        })
        .unwrap();
        for check in &report.checks {
            if !check.passed {
                failures.push(format!("n={n} {}: {}", check.name, check.detail));
            }
        }
        details.push(format!("n={n} ok"));
    }
    report(
        "criterion 3 (structural invariants, 1000 samples each)",
        failures.is_empty(),
        &if failures.is_empty() {
            format!("{} (zero violations)", details.join(", "))
        } else {
            failures.join("; ")
        },
    );
}

#[test]
fn criterion_4_sampler_uniformity() {
    let runs = 60_000u32;
    let complex = CubicalComplex::new(LatticeSize::new(1).unwrap());
    let dual = DualGraph::new(&complex);
    let triangle = Multigraph::cycle(3);
    let cases: [(&str, &Multigraph, u32, usize); 2] = [
        ("n=1 dual", dual.graph(), dual.infinity(), 6),
        ("triangle", &triangle, 0, 3),
    ];
    let mut all_ok = true;
    let mut notes = Vec::new();
    for (label, graph, root, trees) in cases {
        let ab = tree_frequencies(graph, root, TreeSampler::AldousBroder, runs, 0xAC04).unwrap();
        let wl = tree_frequencies(graph, root, TreeSampler::Wilson, runs, 0xAC04).unwrap();
        assert_eq!(ab.len(), trees, "{label}: Aldous-Broder missed a tree");
        assert_eq!(wl.len(), trees, "{label}: Wilson missed a tree");
        let uniform = vec![1.0 / trees as f64; trees];
        let ab_counts: Vec<u64> = ab.values().copied().collect();
        let wl_counts: Vec<u64> = wl.values().copied().collect();
        let g_ab = chi_square_gof(&ab_counts, &uniform, ALPHA);
        let g_wl = chi_square_gof(&wl_counts, &uniform, ALPHA);
        // align the two samplers on the same category order
        let wl_aligned: Vec<u64> = ab.keys().map(|k| wl.get(k).copied().unwrap_or(0)).collect();
        let two = chi_square_two_sample(&ab_counts, &wl_aligned, ALPHA);
        if !(g_ab.passed && g_wl.passed && two.passed) {
            all_ok = false;
        }
        notes.push(format!(
            "{label}: AB chi2 {:.2}, Wilson chi2 {:.2}, two-sample {:.2} (critical {:.2})",
            g_ab.statistic, g_wl.statistic, two.statistic, g_ab.critical
        ));
    }
    report(
        "criterion 4 (sampler uniformity at alpha=0.01)",
        all_ok,
        &notes.join("; "),
    );
}

#[test]
fn criterion_5_desk_scale_exponent() {
    let (records, sweep_time) = &*DESK_SWEEP;
    let aborted = records
        .iter()
        .filter(|r| r.status != SampleStatus::Ok)
        .count();
    assert_eq!(aborted, 0, "desk sweep hit the step cap");
    let table = size_table_from_records(records);
    let estimate = bootstrap_ci(
        &table,
        FitConvention::LogOfMeans,
        1000,
        0.05,
        0xAC05,
        Parallelism::Default,
    )
    .unwrap();
    let interval = estimate.bootstrap.as_ref().unwrap();
    let slope_ok = (2.40..=2.65).contains(&estimate.slope);
    let in_budget = *sweep_time < Duration::from_secs(30 * 60);
    let hypothesis_note = if (interval.lo..=interval.hi).contains(&HYPOTHESIS) {
        "contains 48/19"
    } else {
        "does not contain 48/19"
    };
    report(
        "criterion 5 (desk-scale growth exponent)",
        slope_ok && in_budget,
        &format!(
            "slope {:.4} in [2.40, 2.65], 95% interval [{:.4}, {:.4}] {} ({:.4}), sweep took {:.1?} of 30min budget",
            estimate.slope, interval.lo, interval.hi, hypothesis_note, HYPOTHESIS, sweep_time
        ),
    );
}

#[test]
fn criterion_6_estimator_exactness() {
    let mut power = SizeTable::new();
    let mut constant = SizeTable::new();
    for n in [5u32, 10, 15, 20, 25, 30, 35, 40] {
        let value = 0.73 * (n as f64).powf(HYPOTHESIS);
        for _ in 0..5 {
            power.insert(n, value);
            constant.insert(n, 42.0);
        }
    }
    let mut ok = true;
    let mut notes = Vec::new();
    for convention in [FitConvention::LogOfMeans, FitConvention::MeanOfLogs] {
        let fit = fit_exponent(&power, convention).unwrap();
        let err = (fit.slope - HYPOTHESIS).abs();
        let boot = bootstrap_ci(&power, convention, 500, 0.05, 0xAC06, Parallelism::Default)
            .unwrap();
        let interval = boot.bootstrap.unwrap();
        let width = interval.hi - interval.lo;
        let flat = fit_exponent(&constant, convention).unwrap().slope.abs();
        if err > 1e-12 || width != 0.0 || flat > 1e-12 {
            ok = false;
        }
        notes.push(format!(
            "{convention:?}: slope error {err:.2e}, bootstrap width {width:.1e}, constant slope {flat:.2e}"
        ));
    }
    report(
        "criterion 6 (estimator exactness on synthetic data)",
        ok,
        &notes.join("; "),
    );
}

#[test]
fn criterion_7_walk_step_scaling() {
    let (records, _) = &*DESK_SWEEP;
    let mut normalized = Vec::new();
    for n in [10u32, 20, 40] {
        let steps: Vec<f64> = records
            .iter()
            .filter(|r| r.n == n && r.status == SampleStatus::Ok)
            .map(|r| r.steps as f64)
            .collect();
        assert!(!steps.is_empty());
        let mean = steps.iter().sum::<f64>() / steps.len() as f64;
        let scale = (n as f64).powi(3) * (n as f64).ln();
        normalized.push((n, mean / scale));
    }
    let lo = normalized.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min);
    let hi = normalized
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let detail: Vec<String> = normalized
        .iter()
        .map(|(n, v)| format!("n={n}: {v:.3}"))
        .collect();
    report(
        "criterion 7 (steps scale like n^3 log n)",
        hi / lo <= 3.0,
        &format!("mean steps / (n^3 ln n): {}; spread x{:.2}", detail.join(", "), hi / lo),
    );
}

#[test]
fn criterion_8_parallelism_determinism() {
    let base = SweepConfig {
        n_min: 5,
        n_max: 15,
        n_step: 5,
        reps: 50,
        master_seed: 0xAC08,
        strategy: Parallelism::Sequential,
    };
    let reference = records_to_csv(&run_sweep(&base).unwrap());
    let mut ok = true;
    for width in [1usize, 2, 4] {
        let config = SweepConfig {
            strategy: Parallelism::Threads(width),
            ..base
        };
        if records_to_csv(&run_sweep(&config).unwrap()) != reference {
            ok = false;
        }
    }
    let default_csv = records_to_csv(
        &run_sweep(&SweepConfig {
            strategy: Parallelism::Default,
            ..base
        })
        .unwrap(),
    );
    if default_csv != reference {
        ok = false;
    }
    report(
        "criterion 8 (byte-identical CSV across parallelism widths)",
        ok,
        &format!(
            "sequential vs threads(1,2,4) vs default: {} bytes each",
            reference.len()
        ),
    );
}
