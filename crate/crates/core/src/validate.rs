//! Statistical tests and the per-sample verification pipeline.
//!
//! The verification driver re-derives every invariant from scratch for
//! each sample: homology of the coupled 2-tree, boundary and containment
//! of the surface, agreement between the incremental and linear-solve
//! routes, and (at tiny n) agreement with the exact oracle distribution.

use crate::homology::HomologyWorkspace;
use crate::lattice::LatticeSize;
use crate::lers::{extract_surface_linear, two_tree_faces, LersSampler};
use crate::oracle::{
    empirical_probabilities, mn_reference, total_variation, MnReference, OracleError,
};
use crate::seed::{child_seed, child_stream};
use crate::ust::{aldous_broder, wilson, NoopVisitor, SpanningTree, UstError};
use crate::graph::Multigraph;
use num_traits::ToPrimitive;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use std::collections::BTreeMap;
use std::path::PathBuf;
use thiserror::Error;

/// Cells with expected count below this are merged before chi-square.
const MIN_EXPECTED: f64 = 5.0;

/// Largest lattice size the full verification pipeline accepts; the
/// GF(2) eliminations grow fast beyond this.
pub const MAX_VERIFY_N: u32 = 12;

/// Wilson fallback reference parameters, fixed so reports are seeded.
const REFERENCE_SAMPLES: u64 = 1_000_000;
const REFERENCE_SEED: u64 = 0x1e55_0bac;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("n must lie in 1..={MAX_VERIFY_N} for full verification, got {n}")]
    UnsupportedN { n: u32 },
    #[error("reps must be at least 1")]
    ZeroReps,
    #[error("alpha must lie strictly between 0 and 1, got {got}")]
    BadAlpha { got: f64 },
    #[error("oracle failed: {0}")]
    Oracle(#[from] OracleError),
}

/// Result of one chi-square test after small-cell merging.
#[derive(Clone, Debug)]
pub struct ChiSquareOutcome {
    pub statistic: f64,
    pub df: usize,
    pub critical: f64,
    pub alpha: f64,
    pub passed: bool,
    /// Cells folded into neighbors because their expectation was small.
    pub merged_cells: usize,
}

fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    ChiSquared::new(df as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha)
}

/// Goodness of fit of observed counts against a fixed distribution.
/// `probabilities` must sum to 1 over the same categories as `observed`.
pub fn chi_square_gof(observed: &[u64], probabilities: &[f64], alpha: f64) -> ChiSquareOutcome {
    assert_eq!(observed.len(), probabilities.len());
    let total: u64 = observed.iter().sum();
    let cells: Vec<(f64, f64)> = observed
        .iter()
        .zip(probabilities)
        .map(|(&o, &p)| (o as f64, p * total as f64))
        .collect();
    let (merged, merged_cells) = merge_small_cells(cells, |&(_, e)| e);
    let statistic: f64 = merged
        .iter()
        .map(|&(o, e)| (o - e) * (o - e) / e)
        .sum();
    let df = merged.len().saturating_sub(1);
    finish_chi_square(statistic, df, alpha, merged_cells)
}

/// Two-sample chi-square test of homogeneity on aligned category counts.
pub fn chi_square_two_sample(a: &[u64], b: &[u64], alpha: f64) -> ChiSquareOutcome {
    assert_eq!(a.len(), b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let n = (na + nb) as f64;
    // cell = (a_i, b_i); merge by the smaller of the two expectations
    let cells: Vec<(f64, f64)> = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (x as f64, y as f64))
        .collect();
    let expected_min = move |&(x, y): &(f64, f64)| {
        let pooled = (x + y) / n;
        (na as f64 * pooled).min(nb as f64 * pooled)
    };
    let (merged, merged_cells) = merge_small_cells(cells, expected_min);
    let mut statistic = 0.0;
    for &(x, y) in &merged {
        let pooled = (x + y) / n;
        let (ea, eb) = (na as f64 * pooled, nb as f64 * pooled);
        statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
    }
    let df = merged.len().saturating_sub(1);
    finish_chi_square(statistic, df, alpha, merged_cells)
}

fn finish_chi_square(
    statistic: f64,
    df: usize,
    alpha: f64,
    merged_cells: usize,
) -> ChiSquareOutcome {
    if df == 0 {
        return ChiSquareOutcome {
            statistic,
            df,
            critical: 0.0,
            alpha,
            passed: true,
            merged_cells,
        };
    }
    let critical = chi_square_critical(df, alpha);
    ChiSquareOutcome {
        statistic,
        df,
        critical,
        alpha,
        passed: statistic <= critical,
        merged_cells,
    }
}

/// Greedy left-to-right merge of adjacent cells until every cell's
/// `weight` (its expectation) reaches [`MIN_EXPECTED`]; a light trailing
/// remainder folds into the last kept cell.
fn merge_small_cells<T, W>(cells: Vec<T>, weight: W) -> (Vec<T>, usize)
where
    T: MergeAdd + Copy,
    W: Fn(&T) -> f64,
{
    let before = cells.len();
    let mut merged: Vec<T> = Vec::with_capacity(cells.len());
    let mut pending: Option<T> = None;
    for cell in cells {
        let combined = match pending.take() {
            Some(p) => p.merge_add(cell),
            None => cell,
        };
        if weight(&combined) >= MIN_EXPECTED {
            merged.push(combined);
        } else {
            pending = Some(combined);
        }
    }
    if let Some(p) = pending {
        if let Some(last) = merged.last_mut() {
            *last = last.merge_add(p);
        } else {
            merged.push(p);
        }
    }
    let after = merged.len();
    (merged, before - after)
}

trait MergeAdd {
    fn merge_add(self, other: Self) -> Self;
}

impl MergeAdd for (f64, f64) {
    fn merge_add(self, other: Self) -> Self {
        (self.0 + other.0, self.1 + other.1)
    }
}

/// Two-sided binomial proportion test via the normal approximation.
#[derive(Clone, Debug)]
pub struct BinomialOutcome {
    pub observed: f64,
    pub expected: f64,
    pub margin: f64,
    pub passed: bool,
}

pub fn binomial_two_sided(successes: u64, trials: u64, p: f64, alpha: f64) -> BinomialOutcome {
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(1.0 - alpha / 2.0);
    let observed = successes as f64 / trials as f64;
    let margin = z * (p * (1.0 - p) / trials as f64).sqrt();
    BinomialOutcome {
        observed,
        expected: p,
        margin,
        passed: (observed - p).abs() <= margin,
    }
}

/// Which tree sampler drives a frequency tally.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeSampler {
    AldousBroder,
    Wilson,
}

/// Samples `runs` spanning trees and tallies canonical edge sets.
/// Deterministic in (sampler, master_seed); run r draws from its own
/// child stream.
pub fn tree_frequencies(
    graph: &Multigraph,
    root: u32,
    sampler: TreeSampler,
    runs: u32,
    master_seed: u64,
) -> Result<BTreeMap<Vec<u32>, u64>, UstError> {
    let tag = match sampler {
        TreeSampler::AldousBroder => 0xA1d0,
        TreeSampler::Wilson => 0x7115,
    };
    let mut freq = BTreeMap::new();
    for r in 0..runs {
        let mut rng = child_stream(master_seed, tag, r);
        let tree: SpanningTree = match sampler {
            TreeSampler::AldousBroder => {
                aldous_broder(graph, root, &mut rng, &mut NoopVisitor)?.0
            }
            TreeSampler::Wilson => wilson(graph, root, &mut rng)?.0,
        };
        *freq.entry(tree.canonical_edges()).or_insert(0) += 1;
    }
    Ok(freq)
}

/// One named verification check with a human-readable outcome.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn from_violations(name: &str, reps: u32, violations: u32, first: Option<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: violations == 0,
            detail: match (violations, first) {
                (0, _) => format!("{reps} samples clean"),
                (v, Some(example)) => format!("{v} violation(s); first: {example}"),
                (v, None) => format!("{v} violation(s)"),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub n: u32,
    pub reps: u32,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub n: u32,
    pub reps: u32,
    pub master_seed: u64,
    pub oracle_cap: u64,
    /// Oracle cache directory; None disables caching.
    pub cache_dir: Option<PathBuf>,
    pub alpha: f64,
}

/// Runs `reps` fully checked samples and, for n ≤ 2, compares the size
/// histogram against the oracle.
pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport, VerifyError> {
    if config.n < 1 || config.n > MAX_VERIFY_N {
        return Err(VerifyError::UnsupportedN { n: config.n });
    }
    if config.reps < 1 {
        return Err(VerifyError::ZeroReps);
    }
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(VerifyError::BadAlpha { got: config.alpha });
    }

    let n = config.n;
    let sampler = LersSampler::new(LatticeSize::new(n).expect("n validated"));
    let workspace = HomologyWorkspace::new(sampler.complex());
    let nn = n as usize;
    let upper = 3 * nn * nn * (nn + 1) - nn * nn * nn;

    struct Tally {
        violations: u32,
        first: Option<String>,
    }
    impl Tally {
        fn new() -> Self {
            Tally {
                violations: 0,
                first: None,
            }
        }
        fn hit(&mut self, detail: impl FnOnce() -> String) {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some(detail());
            }
        }
    }

    let mut aborts = Tally::new();
    let mut homology = Tally::new();
    let mut boundary = Tally::new();
    let mut containment = Tally::new();
    let mut equivalence = Tally::new();
    let mut bounds = Tally::new();
    let mut independence = Tally::new();
    let mut sizes: BTreeMap<usize, u64> = BTreeMap::new();

    for rep in 0..config.reps {
        let seed = child_seed(config.master_seed, n, rep);
        let (sample, tree) = match sampler.sample_detailed(seed) {
            Ok(pair) => pair,
            Err(e) => {
                aborts.hit(|| format!("seed {seed}: {e}"));
                continue;
            }
        };
        *sizes.entry(sample.size).or_insert(0) += 1;

        let faces = two_tree_faces(sampler.complex(), &tree);
        if let Err(defect) = workspace.verify_2tree(&faces) {
            homology.hit(|| format!("seed {seed}: {defect}"));
        }
        if sampler.complex().boundary_2(&sample.surface) != *sampler.equatorial_loop() {
            boundary.hit(|| format!("seed {seed}: surface boundary is not the equatorial loop"));
        }
        if let Some(outside) = sample.surface.iter().find(|&f| !faces.contains(f)) {
            containment.hit(|| format!("seed {seed}: surface face {outside} was tree-crossed"));
        }
        match extract_surface_linear(sampler.complex(), &faces, sampler.equatorial_loop()) {
            Ok(solved) if solved == sample.surface => {}
            Ok(_) => equivalence.hit(|| format!("seed {seed}: incremental and solve disagree")),
            Err(e) => equivalence.hit(|| format!("seed {seed}: solve failed: {e}")),
        }
        if sample.size < nn * nn || sample.size > upper || sample.size % 2 != (nn * nn) % 2 {
            bounds.hit(|| format!("seed {seed}: size {} out of law", sample.size));
        }
        match sampler.surface_independence_check(seed) {
            Ok(true) => {}
            Ok(false) => independence.hit(|| format!("seed {seed}: start surface leaked through")),
            Err(e) => independence.hit(|| format!("seed {seed}: {e}")),
        }
    }

    let reps = config.reps;
    let mut checks = vec![
        CheckResult::from_violations("sampler completion", reps, aborts.violations, aborts.first),
        CheckResult::from_violations(
            "2-tree homology (b1 = b2 = 0, face count)",
            reps,
            homology.violations,
            homology.first,
        ),
        CheckResult::from_violations(
            "surface boundary equals equatorial loop",
            reps,
            boundary.violations,
            boundary.first,
        ),
        CheckResult::from_violations(
            "surface lies inside the 2-tree",
            reps,
            containment.violations,
            containment.first,
        ),
        CheckResult::from_violations(
            "incremental surface equals linear solve",
            reps,
            equivalence.violations,
            equivalence.first,
        ),
        CheckResult::from_violations(
            "size bounds and parity",
            reps,
            bounds.violations,
            bounds.first,
        ),
        CheckResult::from_violations(
            "initial-surface independence",
            reps,
            independence.violations,
            independence.first,
        ),
    ];

    if n <= 2 {
        checks.extend(oracle_checks(config, &sizes)?);
    }

    Ok(VerifyReport {
        n,
        reps,
        checks,
    })
}

/// Compares the observed size histogram with the exact (or Wilson
/// reference) distribution.
fn oracle_checks(
    config: &VerifyConfig,
    sizes: &BTreeMap<usize, u64>,
) -> Result<Vec<CheckResult>, VerifyError> {
    let n = LatticeSize::new(config.n).expect("validated");
    let reference = mn_reference(
        n,
        config.oracle_cap,
        REFERENCE_SAMPLES,
        REFERENCE_SEED,
        config.cache_dir.as_deref(),
    )?;
    let total: u64 = sizes.values().sum();
    let mut checks = Vec::new();

    if let MnReference::Exact(dist) = &reference {
        // impossible sizes are a hard violation before any statistics
        let impossible: Vec<usize> = sizes
            .keys()
            .filter(|s| !dist.counts().contains_key(s))
            .copied()
            .collect();
        checks.push(CheckResult {
            name: "observed sizes lie in the oracle support".into(),
            passed: impossible.is_empty(),
            detail: if impossible.is_empty() {
                format!("support {:?}", dist.counts().keys().collect::<Vec<_>>())
            } else {
                format!("impossible sizes observed: {impossible:?}")
            },
        });

        if config.n == 1 {
            let ones = sizes.get(&1).copied().unwrap_or(0);
            let fives = sizes.get(&5).copied().unwrap_or(0);
            for (label, count, p) in [
                ("P(M=1) = 5/6", ones, 5.0 / 6.0),
                ("P(M=5) = 1/6", fives, 1.0 / 6.0),
            ] {
                let outcome = binomial_two_sided(count, total, p, config.alpha);
                checks.push(CheckResult {
                    name: format!("binomial test {label}"),
                    passed: outcome.passed,
                    detail: format!(
                        "observed {:.5}, expected {:.5} ± {:.5}",
                        outcome.observed, outcome.expected, outcome.margin
                    ),
                });
            }
            // mean within 3 sigma of 5/3
            let mean_obs = sizes
                .iter()
                .map(|(&s, &c)| s as f64 * c as f64)
                .sum::<f64>()
                / total as f64;
            let mean = dist.mean().to_f64().unwrap();
            let variance = dist
                .counts()
                .iter()
                .map(|(&s, _)| {
                    let p = dist.probability(s).to_f64().unwrap();
                    p * (s as f64 - mean) * (s as f64 - mean)
                })
                .sum::<f64>();
            let sigma = (variance / total as f64).sqrt();
            checks.push(CheckResult {
                name: "mean within 3 sigma of 5/3".into(),
                passed: (mean_obs - mean).abs() <= 3.0 * sigma,
                detail: format!("observed {mean_obs:.5}, expected {mean:.5} ± {:.5}", 3.0 * sigma),
            });
            return Ok(checks);
        }
    }

    // generic path (n = 2 exact, or Wilson reference): chi-square GOF
    // over the reference support, plus the total-variation figure
    let reference_probs = reference.probabilities_f64();
    let support: Vec<usize> = reference_probs.keys().copied().collect();
    let observed: Vec<u64> = support
        .iter()
        .map(|s| sizes.get(s).copied().unwrap_or(0))
        .collect();
    let probabilities: Vec<f64> = support.iter().map(|s| reference_probs[s]).collect();
    let outcome = chi_square_gof(&observed, &probabilities, config.alpha);
    let tv = total_variation(&reference_probs, &empirical_probabilities(sizes, total));
    checks.push(CheckResult {
        name: "chi-square vs oracle distribution".into(),
        passed: outcome.passed,
        detail: format!(
            "statistic {:.3} vs critical {:.3} (df {}, {} merged cells); total variation {:.5}",
            outcome.statistic, outcome.critical, outcome.df, outcome.merged_cells, tv
        ),
    });
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ust::count_spanning_trees;
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;

    #[test]
    fn chi_square_critical_values() {
        // frozen reference quantiles of the chi-square distribution
        assert!((chi_square_critical(5, 0.01) - 15.086).abs() < 0.01);
        assert!((chi_square_critical(1, 0.01) - 6.635).abs() < 0.01);
        assert!((chi_square_critical(2, 0.05) - 5.991).abs() < 0.01);
    }

    #[test]
    fn gof_accepts_perfect_fit_and_rejects_gross_skew() {
        let uniform = [1.0 / 6.0; 6];
        let exact = [100u64; 6];
        let outcome = chi_square_gof(&exact, &uniform, 0.01);
        assert!(outcome.passed);
        assert_eq!(outcome.statistic, 0.0);
        assert_eq!(outcome.df, 5);

        let skewed = [350u64, 50, 50, 50, 50, 50];
        assert!(!chi_square_gof(&skewed, &uniform, 0.01).passed);
    }

    #[test]
    fn gof_merges_thin_cells() {
        // expected counts: 0.5, 4.5, 45, 50 → the two leading cells fold
        let probabilities = [0.005, 0.045, 0.45, 0.5];
        let observed = [1u64, 4, 45, 50];
        let outcome = chi_square_gof(&observed, &probabilities, 0.05);
        assert!(outcome.merged_cells >= 1);
        assert!(outcome.df < 3);
        assert!(outcome.passed);
    }

    #[test]
    fn two_sample_agreement_and_disagreement() {
        let a = [500u64, 300, 200];
        let same = [505u64, 295, 200];
        assert!(chi_square_two_sample(&a, &same, 0.01).passed);
        let different = [200u64, 300, 500];
        assert!(!chi_square_two_sample(&a, &different, 0.01).passed);
    }

    #[test]
    fn binomial_bounds() {
        // exactly on expectation
        assert!(binomial_two_sided(5000, 10000, 0.5, 0.01).passed);
        // far off expectation
        assert!(!binomial_two_sided(6000, 10000, 0.5, 0.01).passed);
        let outcome = binomial_two_sided(50000, 60000, 5.0 / 6.0, 0.01);
        assert!(outcome.passed);
        assert!((outcome.observed - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn tree_frequencies_are_deterministic_and_complete() {
        let g = Multigraph::banana(6);
        let a = tree_frequencies(&g, 0, TreeSampler::AldousBroder, 300, 5).unwrap();
        let b = tree_frequencies(&g, 0, TreeSampler::AldousBroder, 300, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values().sum::<u64>(), 300);
        // all six single-edge trees occur in 300 runs
        assert_eq!(a.len(), 6);
        let w = tree_frequencies(&g, 0, TreeSampler::Wilson, 300, 5).unwrap();
        assert_eq!(w.values().sum::<u64>(), 300);
    }

    #[test]
    fn samplers_look_uniform_on_the_triangle() {
        let g = Multigraph::cycle(3);
        let trees = count_spanning_trees(&g);
        assert_eq!(trees, BigInt::from(3));
        let uniform = vec![1.0 / 3.0; 3];
        for sampler in [TreeSampler::AldousBroder, TreeSampler::Wilson] {
            let freq = tree_frequencies(&g, 0, sampler, 3000, 11).unwrap();
            assert_eq!(freq.len(), 3, "{sampler:?} missed a tree");
            let observed: Vec<u64> = freq.values().copied().collect();
            let outcome = chi_square_gof(&observed, &uniform, 0.01);
            assert!(
                outcome.passed,
                "{sampler:?}: statistic {} vs {}",
                outcome.statistic, outcome.critical
            );
        }
    }

    #[test]
    fn verify_passes_at_tiny_sizes() {
        for (n, reps) in [(1u32, 300u32), (2, 400), (4, 15)] {
            let report = run_verify(&VerifyConfig {
                n,
                reps,
                master_seed: 91,
                oracle_cap: crate::oracle::DEFAULT_ENUMERATION_CAP,
                cache_dir: None,
                alpha: 0.01,
            })
            .unwrap();
            for check in &report.checks {
                assert!(
                    check.passed,
                    "n={n}: check `{}` failed: {}",
                    check.name, check.detail
                );
            }
        }
    }

    #[test]
    fn verify_rejects_bad_configs() {
        let base = VerifyConfig {
            n: 0,
            reps: 10,
            master_seed: 1,
            oracle_cap: 100,
            cache_dir: None,
            alpha: 0.01,
        };
        assert!(matches!(
            run_verify(&base),
            Err(VerifyError::UnsupportedN { n: 0 })
        ));
        assert!(matches!(
            run_verify(&VerifyConfig { n: 13, ..base.clone() }),
            Err(VerifyError::UnsupportedN { n: 13 })
        ));
        assert!(matches!(
            run_verify(&VerifyConfig { n: 2, reps: 0, ..base.clone() }),
            Err(VerifyError::ZeroReps)
        ));
        assert!(matches!(
            run_verify(&VerifyConfig { n: 2, alpha: 1.0, ..base }),
            Err(VerifyError::BadAlpha { .. })
        ));
    }

    #[test]
    fn mean_check_catches_shifted_data() {
        // synthetic histogram far from the n=1 law must fail the oracle
        // comparison; run the checks directly on a fake histogram
        let config = VerifyConfig {
            n: 1,
            reps: 1000,
            master_seed: 0,
            oracle_cap: 100,
            cache_dir: None,
            alpha: 0.01,
        };
        let skewed: BTreeMap<usize, u64> = [(1usize, 200u64), (5, 800)].into_iter().collect();
        let checks = oracle_checks(&config, &skewed).unwrap();
        assert!(checks.iter().any(|c| !c.passed), "skew must be detected");
        let faithful: BTreeMap<usize, u64> = [(1usize, 833u64), (5, 167)].into_iter().collect();
        let checks = oracle_checks(&config, &faithful).unwrap();
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn verify_uses_wilson_reference_when_capped() {
        // cap below 6 forces the Monte Carlo fallback even at n=1
        let report = run_verify(&VerifyConfig {
            n: 1,
            reps: 400,
            master_seed: 3,
            oracle_cap: 2,
            cache_dir: None,
            alpha: 0.01,
        })
        .unwrap();
        let gof = report
            .checks
            .iter()
            .find(|c| c.name.contains("chi-square"))
            .expect("fallback path must run the generic comparison");
        assert!(gof.passed, "{}", gof.detail);
    }

    #[test]
    fn exact_distribution_mean_used_in_checks_is_sane() {
        let dist = crate::oracle::exact_mn_distribution(LatticeSize::new(1).unwrap(), 100)
            .unwrap();
        assert!((dist.mean().to_f64().unwrap() - 5.0 / 3.0).abs() < 1e-12);
    }
}
