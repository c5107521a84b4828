//! Monte Carlo laboratory for loop-erased random surfaces on cubical
//! lattices.
//!
//! The pipeline: build the cubical complex on `[0, n]^3`, form the dual
//! multigraph of its cubes plus an outside vertex, sample a uniform
//! spanning tree of the dual (which couples to a uniform spanning 2-tree
//! of the complex), and maintain the unique surface bounded by the
//! equatorial loop while the tree grows. The surface size statistics
//! feed a log-log regression that estimates the growth exponent, with
//! bootstrap confidence intervals.
//!
//! Module map:
//! - [`lattice`]: cells of the cubical complex, chains over GF(2),
//!   boundary operators, the equatorial loop.
//! - [`graph`] and [`dual`]: multigraphs and the cube/outside dual.
//! - [`ust`]: Aldous-Broder and Wilson samplers, step events, exact
//!   spanning-tree counts.
//! - [`lers`]: the incremental surface update and the independent
//!   linear-solve extraction route.
//! - [`homology`]: GF(2) elimination, Betti numbers, 2-tree checks.
//! - [`oracle`]: exhaustive enumeration of small duals and exact size
//!   distributions.
//! - [`sweep`], [`stats`]: replicated sweeps over lattice sizes, the
//!   exponent fit and bootstrap.
//! - [`validate`]: per-sample invariant checking and statistical tests.
//! - [`seed`], [`par`]: deterministic seed derivation and the optional
//!   thread-parallel map.

pub mod bits;
pub mod dual;
pub mod graph;
pub mod homology;
pub mod lattice;
pub mod lers;
pub mod oracle;
pub mod par;
pub mod seed;
pub mod stats;
pub mod sweep;
pub mod ust;
pub mod validate;

pub use dual::DualGraph;
pub use graph::Multigraph;
pub use homology::{solve_bounded_chain, HomologyWorkspace, SolveOutcome, TwoTreeDefect};
pub use lattice::{Axis, Chain1, Chain2, CubicalComplex, LatticeError, LatticeSize};
pub use lers::{
    extract_surface_linear, two_tree_faces, LersSample, LersSampler, SurfaceError, SurfaceState,
};
pub use oracle::{
    exact_mn_distribution, exact_mn_distribution_cached, mn_reference, total_variation,
    ExactDistribution, MnReference, OracleError, DEFAULT_ENUMERATION_CAP,
};
pub use par::Parallelism;
pub use seed::{child_seed, child_stream, RngStream};
pub use stats::{
    bootstrap_ci, fit_exponent, summarize, BootstrapInterval, ExponentEstimate, FitConvention,
    SizeSummary, SizeTable, StatsError,
};
pub use sweep::{
    parse_csv, records_to_csv, run_sweep, size_table_from_records, CsvError, SampleRecord,
    SampleStatus, SweepConfig, SweepError, CSV_HEADER,
};
pub use ust::{
    aldous_broder, count_spanning_trees, default_step_cap, wilson, NoopVisitor, SpanningTree,
    StepEvent, StepVisitor, UstError,
};
pub use validate::{
    binomial_two_sided, chi_square_gof, chi_square_two_sample, run_verify, tree_frequencies,
    BinomialOutcome, CheckResult, ChiSquareOutcome, TreeSampler, VerifyConfig, VerifyError,
    VerifyReport, MAX_VERIFY_N,
};
