//! Exact ground truth at tiny sizes: full spanning-tree enumeration,
//! the exact distribution of the surface size M_n, and an independent
//! Monte Carlo reference for sizes where enumeration is infeasible.
//!
//! Everything here deliberately avoids the incremental surface updates
//! used by the production sampler. Surfaces come from the linear-solve
//! route, and the fallback reference samples trees with Wilson's
//! algorithm rather than Aldous-Broder, so agreement between this module
//! and the sampler cross-validates independent code paths.

use crate::dual::DualGraph;
use crate::graph::Multigraph;
use crate::lattice::{CubicalComplex, LatticeSize};
use crate::lers::{extract_surface_linear, two_tree_faces, SurfaceError};
use crate::seed::RngStream;
use crate::ust::{count_spanning_trees, wilson, UstError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Bump when enumeration or the size computation changes meaningfully;
/// stale cache files are then ignored.
const ALGORITHM_VERSION: u32 = 1;

/// Default enumeration budget.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("graph has {count} spanning trees, over the enumeration cap of {cap}")]
    CapExceeded { count: BigInt, cap: u64 },
    #[error("enumerated tree produced an invalid 2-tree: {0}")]
    BrokenTree(#[from] SurfaceError),
    #[error("reference sampling failed: {0}")]
    Sampler(#[from] UstError),
}

/// Exact distribution of M_n, kept as integer counts so every derived
/// probability is an exact rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDistribution {
    n: u32,
    counts: BTreeMap<usize, u64>,
    tree_count: BigInt,
}

impl ExactDistribution {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn tree_count(&self) -> &BigInt {
        &self.tree_count
    }

    /// Surface-size support with the number of trees realizing each size.
    pub fn counts(&self) -> &BTreeMap<usize, u64> {
        &self.counts
    }

    pub fn probability(&self, size: usize) -> BigRational {
        let count = self.counts.get(&size).copied().unwrap_or(0);
        BigRational::new(BigInt::from(count), self.tree_count.clone())
    }

    pub fn mean(&self) -> BigRational {
        let weighted: BigInt = self
            .counts
            .iter()
            .map(|(&size, &count)| BigInt::from(size) * BigInt::from(count))
            .sum();
        BigRational::new(weighted, self.tree_count.clone())
    }

    pub fn probabilities_f64(&self) -> BTreeMap<usize, f64> {
        self.counts
            .iter()
            .map(|(&size, _)| (size, self.probability(size).to_f64().unwrap()))
            .collect()
    }
}

/// Enumerates every spanning tree exactly once, passing each tree's
/// sorted edge ids to `visit`.
///
/// Contraction/deletion search: at each edge the recursion branches on
/// include (contract) versus exclude, and the exclude branch is pruned
/// unless the remaining graph stays connected, so every leaf is a tree.
/// Refuses up front, with the exact count, when the matrix-tree total
/// exceeds `cap`.
pub fn enumerate_trees<F: FnMut(&[u32])>(
    graph: &Multigraph,
    cap: u64,
    visit: F,
) -> Result<u64, OracleError> {
    let count = count_spanning_trees(graph);
    if count > BigInt::from(cap) {
        return Err(OracleError::CapExceeded { count, cap });
    }
    let mut enumerator = Enumerator {
        graph,
        dsu: RollbackDsu::new(graph.vertex_count()),
        scratch: vec![0; graph.vertex_count()],
        chosen: Vec::with_capacity(graph.vertex_count() - 1),
        visit,
        leaves: 0,
    };
    enumerator.recurse(0, graph.vertex_count());
    debug_assert_eq!(BigInt::from(enumerator.leaves), count);
    Ok(enumerator.leaves)
}

struct Enumerator<'a, F: FnMut(&[u32])> {
    graph: &'a Multigraph,
    dsu: RollbackDsu,
    scratch: Vec<u32>,
    chosen: Vec<u32>,
    visit: F,
    leaves: u64,
}

impl<F: FnMut(&[u32])> Enumerator<'_, F> {
    fn recurse(&mut self, index: usize, components: usize) {
        if components == 1 {
            self.leaves += 1;
            (self.visit)(&self.chosen);
            return;
        }
        if index == self.graph.edge_count() {
            return;
        }
        let (u, v) = self.graph.endpoints(index as u32);
        if self.dsu.find(u) == self.dsu.find(v) {
            // already contracted together: the edge would close a cycle
            self.recurse(index + 1, components);
            return;
        }
        let mark = self.dsu.mark();
        self.dsu.union(u, v);
        self.chosen.push(index as u32);
        self.recurse(index + 1, components - 1);
        self.chosen.pop();
        self.dsu.rollback(mark);
        if self.connected_without(index) {
            self.recurse(index + 1, components);
        }
    }

    /// Is the contraction still connected using only edges after `index`?
    fn connected_without(&mut self, index: usize) -> bool {
        let n = self.graph.vertex_count();
        for v in 0..n as u32 {
            self.scratch[v as usize] = self.dsu.find(v);
        }
        let mut components = {
            let mut roots = self.scratch.clone();
            roots.sort_unstable();
            roots.dedup();
            roots.len()
        };
        // flat union-find over scratch, path-halving
        fn find(scratch: &mut [u32], mut v: u32) -> u32 {
            while scratch[v as usize] != v {
                scratch[v as usize] = scratch[scratch[v as usize] as usize];
                v = scratch[v as usize];
            }
            v
        }
        for e in (index as u32 + 1)..self.graph.edge_count() as u32 {
            let (u, v) = self.graph.endpoints(e);
            let (ru, rv) = (find(&mut self.scratch, u), find(&mut self.scratch, v));
            if ru != rv {
                self.scratch[ru as usize] = rv;
                components -= 1;
                if components == 1 {
                    return true;
                }
            }
        }
        components == 1
    }
}

/// Union-find with undo, no path compression so rollback is a stack pop.
struct RollbackDsu {
    parent: Vec<u32>,
    rank: Vec<u8>,
    log: Vec<(u32, bool)>,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        RollbackDsu {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            log: Vec::new(),
        }
    }

    fn find(&self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            v = self.parent[v as usize];
        }
        v
    }

    fn mark(&self) -> usize {
        self.log.len()
    }

    fn union(&mut self, u: u32, v: u32) {
        let (mut ru, mut rv) = (self.find(u), self.find(v));
        debug_assert_ne!(ru, rv);
        if self.rank[ru as usize] > self.rank[rv as usize] {
            std::mem::swap(&mut ru, &mut rv);
        }
        let bumped = self.rank[ru as usize] == self.rank[rv as usize];
        self.parent[ru as usize] = rv;
        if bumped {
            self.rank[rv as usize] += 1;
        }
        self.log.push((ru, bumped));
    }

    fn rollback(&mut self, mark: usize) {
        while self.log.len() > mark {
            let (child, bumped) = self.log.pop().unwrap();
            let root = self.parent[child as usize];
            self.parent[child as usize] = child;
            if bumped {
                self.rank[root as usize] -= 1;
            }
        }
    }
}

/// Computes the exact distribution of M_n by enumerating every spanning
/// tree of the dual graph and solving for each tree's unique bounded
/// surface.
pub fn exact_mn_distribution(
    n: LatticeSize,
    cap: u64,
) -> Result<ExactDistribution, OracleError> {
    let complex = CubicalComplex::new(n);
    let dual = DualGraph::new(&complex);
    let loop_chain = complex.equatorial_loop();
    let mut all_faces = complex.empty_chain2();
    for f in 0..complex.face_count() as u32 {
        all_faces.insert(f);
    }

    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    let mut failure: Option<SurfaceError> = None;
    let trees = enumerate_trees(dual.graph(), cap, |tree_edges| {
        if failure.is_some() {
            return;
        }
        // dual edge ids equal face ids: allowed faces = complement of tree
        let mut allowed = all_faces.clone();
        for &e in tree_edges {
            allowed.toggle(e);
        }
        match extract_surface_linear(&complex, &allowed, &loop_chain) {
            Ok(surface) => *counts.entry(surface.size()).or_insert(0) += 1,
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(OracleError::BrokenTree(e));
    }
    Ok(ExactDistribution {
        n: n.get(),
        counts,
        tree_count: BigInt::from(trees),
    })
}

/// Cache wrapper around [`exact_mn_distribution`]: reads a previously
/// computed distribution when a valid cache file exists, writes one
/// (best effort) after computing otherwise.
pub fn exact_mn_distribution_cached(
    n: LatticeSize,
    cap: u64,
    cache_dir: &Path,
) -> Result<ExactDistribution, OracleError> {
    let path = cache_path(cache_dir, n.get(), cap);
    if let Some(dist) = read_cache(&path, n.get(), cap) {
        return Ok(dist);
    }
    let dist = exact_mn_distribution(n, cap)?;
    let _ = write_cache(&path, cap, &dist);
    Ok(dist)
}

/// Default cache directory: `LERS_CACHE_DIR` if set, else a fixed
/// subdirectory of the system temp dir.
pub fn default_cache_dir() -> PathBuf {
    match std::env::var_os("LERS_CACHE_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => std::env::temp_dir().join("lers-oracle-cache"),
    }
}

fn cache_path(dir: &Path, n: u32, cap: u64) -> PathBuf {
    dir.join(format!("mn-n{n}-cap{cap}-v{ALGORITHM_VERSION}.txt"))
}

fn write_cache(path: &Path, cap: u64, dist: &ExactDistribution) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = Vec::new();
    writeln!(out, "# exact M_n distribution cache")?;
    writeln!(out, "version {ALGORITHM_VERSION}")?;
    writeln!(out, "n {}", dist.n)?;
    writeln!(out, "cap {cap}")?;
    writeln!(out, "trees {}", dist.tree_count)?;
    writeln!(out, "sizes {}", dist.counts.len())?;
    for (size, count) in &dist.counts {
        writeln!(out, "{size} {count}")?;
    }
    std::fs::write(path, out)
}

/// Returns None on any mismatch or malformed content; the caller then
/// recomputes.
fn read_cache(path: &Path, n: u32, cap: u64) -> Option<ExactDistribution> {
    let text = std::fs::read_to_string(path).ok()?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let mut field = |name: &str| -> Option<String> {
        let line = lines.next()?;
        let rest = line.strip_prefix(name)?.strip_prefix(' ')?;
        Some(rest.to_string())
    };
    if field("version")?.parse::<u32>().ok()? != ALGORITHM_VERSION {
        return None;
    }
    if field("n")?.parse::<u32>().ok()? != n {
        return None;
    }
    if field("cap")?.parse::<u64>().ok()? != cap {
        return None;
    }
    let tree_count: BigInt = field("trees")?.parse().ok()?;
    let size_rows: usize = field("sizes")?.parse().ok()?;
    let mut counts = BTreeMap::new();
    for _ in 0..size_rows {
        let line = lines.next()?;
        let (size, count) = line.split_once(' ')?;
        counts.insert(size.parse().ok()?, count.parse().ok()?);
    }
    if lines.next().is_some() {
        return None;
    }
    let total: u64 = counts.values().sum();
    if BigInt::from(total) != tree_count {
        return None;
    }
    Some(ExactDistribution {
        n,
        counts,
        tree_count,
    })
}

/// A ground-truth distribution for comparing empirical samples against:
/// exact when enumeration fits the cap, otherwise a seeded Wilson-based
/// Monte Carlo reference (independent of the production sampler).
#[derive(Clone, Debug)]
pub enum MnReference {
    Exact(ExactDistribution),
    WilsonMonteCarlo {
        counts: BTreeMap<usize, u64>,
        samples: u64,
        seed: u64,
    },
}

impl MnReference {
    pub fn probabilities_f64(&self) -> BTreeMap<usize, f64> {
        match self {
            MnReference::Exact(d) => d.probabilities_f64(),
            MnReference::WilsonMonteCarlo {
                counts, samples, ..
            } => empirical_probabilities(counts, *samples),
        }
    }
}

/// Builds the best available reference for size `n`: exact if the tree
/// count fits under `cap`, else `mc_samples` Wilson draws from `mc_seed`.
pub fn mn_reference(
    n: LatticeSize,
    cap: u64,
    mc_samples: u64,
    mc_seed: u64,
    cache_dir: Option<&Path>,
) -> Result<MnReference, OracleError> {
    let exact = match cache_dir {
        Some(dir) => exact_mn_distribution_cached(n, cap, dir),
        None => exact_mn_distribution(n, cap),
    };
    match exact {
        Ok(dist) => Ok(MnReference::Exact(dist)),
        Err(OracleError::CapExceeded { .. }) => {
            let counts = wilson_reference_counts(n, mc_samples, mc_seed)?;
            Ok(MnReference::WilsonMonteCarlo {
                counts,
                samples: mc_samples,
                seed: mc_seed,
            })
        }
        Err(other) => Err(other),
    }
}

/// Samples M_n with Wilson trees and linear-solve surfaces: no code
/// shared with the Aldous-Broder incremental route.
pub fn wilson_reference_counts(
    n: LatticeSize,
    samples: u64,
    seed: u64,
) -> Result<BTreeMap<usize, u64>, OracleError> {
    let complex = CubicalComplex::new(n);
    let dual = DualGraph::new(&complex);
    let loop_chain = complex.equatorial_loop();
    let mut rng = RngStream::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..samples {
        let (tree, _) = wilson(dual.graph(), dual.infinity(), &mut rng)?;
        let faces = two_tree_faces(&complex, &tree);
        let surface = extract_surface_linear(&complex, &faces, &loop_chain)?;
        *counts.entry(surface.size()).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Normalizes integer counts into probabilities.
pub fn empirical_probabilities(counts: &BTreeMap<usize, u64>, total: u64) -> BTreeMap<usize, f64> {
    counts
        .iter()
        .map(|(&size, &count)| (size, count as f64 / total as f64))
        .collect()
}

/// Total variation distance ½ Σ |p − q| over the union of supports.
pub fn total_variation(p: &BTreeMap<usize, f64>, q: &BTreeMap<usize, f64>) -> f64 {
    let keys: std::collections::BTreeSet<usize> =
        p.keys().chain(q.keys()).copied().collect();
    0.5 * keys
        .iter()
        .map(|k| (p.get(k).unwrap_or(&0.0) - q.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

/// Exact probabilities must sum to one; exposed for tests and the
/// verification pipeline.
pub fn probabilities_sum_to_one(dist: &ExactDistribution) -> bool {
    let sum: BigRational = dist
        .counts
        .keys()
        .map(|&s| dist.probability(s))
        .fold(BigRational::zero(), |acc, p| acc + p);
    sum == BigRational::one()
}
