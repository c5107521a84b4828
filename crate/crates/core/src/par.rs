//! Execution-strategy selection for embarrassingly parallel loops.
//!
//! The `parallel` feature gates the rayon dependency; without it every
//! strategy degrades to the sequential loop. Results are returned in
//! index order either way, so callers observe identical output.

/// How to fan a batch of independent jobs across cores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    /// Run in the calling thread, one job after another.
    Sequential,
    /// Rayon pool with exactly this many threads.
    Threads(usize),
    /// Rayon's global default pool.
    Default,
}

/// Maps `f` over `0..count`, fanning out per `strategy`. Output order is
/// index order regardless of strategy.
pub fn map_indexed<T, F>(strategy: Parallelism, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    match strategy {
        Parallelism::Sequential => (0..count).map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Threads(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .expect("building a local rayon pool");
            pool.install(|| {
                use rayon::prelude::*;
                (0..count).into_par_iter().map(&f).collect()
            })
        }
        #[cfg(feature = "parallel")]
        Parallelism::Default => {
            use rayon::prelude::*;
            (0..count).into_par_iter().map(&f).collect()
        }
        #[cfg(not(feature = "parallel"))]
        Parallelism::Threads(_) | Parallelism::Default => (0..count).map(f).collect(),
    }
}
