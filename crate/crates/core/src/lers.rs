//! The core experiment: sample a uniform spanning tree of the dual graph
//! from the outer vertex while incrementally maintaining a surface
//! bounded by the equatorial loop.
//!
//! When the walk finishes, the remaining faces form a uniform 2-tree and
//! the maintained chain is the unique surface inside it with the loop as
//! boundary: the loop-erased random surface.

use crate::dual::DualGraph;
use crate::homology::{solve_bounded_chain, SolveOutcome};
use crate::lattice::{Axis, Chain1, Chain2, CubicalComplex, LatticeSize};
use crate::seed::RngStream;
use crate::ust::{aldous_broder, SpanningTree, StepEvent, StepVisitor, UstError};
use rand::SeedableRng;
use thiserror::Error;

/// Incremental surface maintenance, driven by sampler events.
///
/// On each tree edge whose dual face lies in the surface, the state adds
/// (mod 2) the six-face boundary of the newly attached cube. That keeps
/// the chain's boundary fixed at the equatorial loop and expels the
/// crossed face.
pub struct SurfaceState<'a> {
    complex: &'a CubicalComplex,
    outer_vertex: u32,
    surface: Chain2,
    updates: u64,
    /// Debug builds only: when the LERS_INJECT_FAULT environment variable
    /// is set, the first due update is skipped. A negative control: every
    /// downstream verification must then detect the broken surface.
    #[cfg(debug_assertions)]
    skip_next_update: bool,
}

impl<'a> SurfaceState<'a> {
    pub fn new(complex: &'a CubicalComplex, outer_vertex: u32, initial: Chain2) -> Self {
        assert_eq!(initial.capacity(), complex.face_count());
        SurfaceState {
            complex,
            outer_vertex,
            surface: initial,
            updates: 0,
            #[cfg(debug_assertions)]
            skip_next_update: std::env::var_os("LERS_INJECT_FAULT").is_some(),
        }
    }

    pub fn surface(&self) -> &Chain2 {
        &self.surface
    }

    pub fn into_surface(self) -> Chain2 {
        self.surface
    }

    /// Number of tree edges that triggered a surface update.
    pub fn updates(&self) -> u64 {
        self.updates
    }
}

impl StepVisitor for SurfaceState<'_> {
    fn on_event(&mut self, event: StepEvent) {
        let StepEvent::TreeEdgeAdded { edge, new, .. } = event else {
            return;
        };
        // the walk starts at the outer vertex, so every discovery is a cube
        debug_assert_ne!(new, self.outer_vertex);
        // dual edge ids equal face ids
        if self.surface.contains(edge) {
            #[cfg(debug_assertions)]
            if std::mem::take(&mut self.skip_next_update) {
                return;
            }
            for &f in self.complex.cube_faces(new) {
                self.surface.toggle(f);
            }
            self.updates += 1;
        }
    }
}

/// One sampled loop-erased random surface.
#[derive(Clone, Debug)]
pub struct LersSample {
    pub n: u32,
    pub seed: u64,
    pub surface: Chain2,
    /// Face count of the surface, the statistic M_n under study.
    pub size: usize,
    /// Random-walk steps the covering walk took.
    pub steps: u64,
}

/// Why a linear surface extraction failed; both cases mean the face set
/// was not a valid 2-tree.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("no chain in the face set bounds the loop (first homology obstruction)")]
    NoSolution,
    #[error("multiple chains bound the loop (the face set carries a 2-cycle)")]
    NonUnique,
}

/// Sampler for loop-erased random surfaces at a fixed lattice size.
///
/// Owns the complex and dual graph; immutable after construction, so one
/// instance serves any number of concurrent sampling strands.
pub struct LersSampler {
    complex: CubicalComplex,
    dual: DualGraph,
    equatorial_loop: Chain1,
    initial_surface: Chain2,
}

impl LersSampler {
    pub fn new(size: LatticeSize) -> Self {
        let complex = CubicalComplex::new(size);
        let dual = DualGraph::new(&complex);
        let equatorial_loop = complex.equatorial_loop();
        let initial_surface = complex.initial_surface();
        LersSampler {
            complex,
            dual,
            equatorial_loop,
            initial_surface,
        }
    }

    pub fn complex(&self) -> &CubicalComplex {
        &self.complex
    }

    pub fn dual(&self) -> &DualGraph {
        &self.dual
    }

    pub fn equatorial_loop(&self) -> &Chain1 {
        &self.equatorial_loop
    }

    pub fn initial_surface(&self) -> &Chain2 {
        &self.initial_surface
    }

    /// A second valid starting surface, used to confirm the result does
    /// not depend on the choice: the plane lifted to z = ⌊n/2⌋ + 1,
    /// closed off by the band of side faces between the two heights.
    pub fn shifted_initial_surface(&self) -> Chain2 {
        let n = self.complex.n();
        let h = n / 2;
        let mut chain = self.complex.empty_chain2();
        for x in 0..n {
            for y in 0..n {
                chain.insert(self.complex.face_id(Axis::Z, [x, y, h + 1]));
            }
        }
        for t in 0..n {
            chain.insert(self.complex.face_id(Axis::X, [0, t, h]));
            chain.insert(self.complex.face_id(Axis::X, [n, t, h]));
            chain.insert(self.complex.face_id(Axis::Y, [t, 0, h]));
            chain.insert(self.complex.face_id(Axis::Y, [t, n, h]));
        }
        chain
    }

    /// Draws one surface from the seeded stream.
    pub fn sample(&self, seed: u64) -> Result<LersSample, UstError> {
        self.sample_detailed(seed).map(|(sample, _)| sample)
    }

    /// Like [`sample`](Self::sample), also returning the spanning tree
    /// behind the surface for structural checks.
    pub fn sample_detailed(&self, seed: u64) -> Result<(LersSample, SpanningTree), UstError> {
        self.sample_with_initial(seed, self.initial_surface.clone())
    }

    /// Runs the coupled walk from a caller-chosen starting surface.
    /// Any chain bounded by the equatorial loop yields the same result.
    pub fn sample_with_initial(
        &self,
        seed: u64,
        initial: Chain2,
    ) -> Result<(LersSample, SpanningTree), UstError> {
        let mut rng = RngStream::seed_from_u64(seed);
        let mut state = SurfaceState::new(&self.complex, self.dual.infinity(), initial);
        let (tree, steps) =
            aldous_broder(self.dual.graph(), self.dual.infinity(), &mut rng, &mut state)?;
        let surface = state.into_surface();
        let sample = LersSample {
            n: self.complex.n(),
            seed,
            size: surface.size(),
            steps,
            surface,
        };
        Ok((sample, tree))
    }

    /// Samples twice from the same seed with the two starting surfaces
    /// and reports whether the final surfaces coincide.
    pub fn surface_independence_check(&self, seed: u64) -> Result<bool, UstError> {
        let (a, _) = self.sample_with_initial(seed, self.initial_surface.clone())?;
        let (b, _) = self.sample_with_initial(seed, self.shifted_initial_surface())?;
        Ok(a.surface == b.surface)
    }
}

/// The faces surviving tree removal: everything except the face crossed
/// by each tree edge. This is the 2-tree coupled to the spanning tree.
pub fn two_tree_faces(complex: &CubicalComplex, tree: &SpanningTree) -> Chain2 {
    let mut faces = complex.empty_chain2();
    for f in 0..complex.face_count() as u32 {
        faces.insert(f);
    }
    for &e in tree.edges() {
        faces.toggle(e);
    }
    faces
}

/// Recovers the surface by direct linear solve over the 2-tree's faces.
///
/// Fully independent of the incremental route; agreement between the two
/// is a standing cross-check.
pub fn extract_surface_linear(
    complex: &CubicalComplex,
    two_tree: &Chain2,
    boundary: &Chain1,
) -> Result<Chain2, SurfaceError> {
    match solve_bounded_chain(complex, two_tree, boundary) {
        SolveOutcome::Unique(chain) => Ok(chain),
        SolveOutcome::NoSolution => Err(SurfaceError::NoSolution),
        SolveOutcome::NonUnique => Err(SurfaceError::NonUnique),
    }
}
