//! GF(2) linear algebra over the cell complex: ranks of boundary maps,
//! Betti numbers of face subcomplexes, and bounded-chain solving.
//!
//! Every subcomplex here shares the full vertex and edge skeleton of the
//! ambient lattice and varies only in its face set, which is what the
//! 2-tree property constrains.

use crate::bits::Bits;
use crate::lattice::{Chain1, Chain2, CubicalComplex};
use thiserror::Error;

/// Dense bit-packed matrix over GF(2).
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<Bits>,
}

impl Gf2Matrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        Gf2Matrix {
            cols,
            rows: (0..rows).map(|_| Bits::new(cols)).collect(),
        }
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.rows[row].set(col, value);
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row].get(col)
    }

    /// In-place reduction to reduced row echelon form.
    ///
    /// Returns the pivot columns in order; pivot i lives in row i.
    pub fn reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        for col in 0..self.cols {
            let next = pivots.len();
            let Some(found) = (next..self.rows.len()).find(|&r| self.rows[r].get(col)) else {
                continue;
            };
            self.rows.swap(next, found);
            let pivot_row = std::mem::replace(&mut self.rows[next], Bits::new(0));
            for (r, row) in self.rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            self.rows[next] = pivot_row;
            pivots.push(col);
        }
        pivots
    }

    pub fn rank(mut self) -> usize {
        self.reduce().len()
    }
}

/// Outcome of solving ∂₂ x = target over a restricted face set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// Exactly one chain within the allowed faces has the target boundary.
    Unique(Chain2),
    NoSolution,
    /// Solutions exist but differ by a nonzero 2-cycle in the allowed set.
    NonUnique,
}

/// Solves ∂₂ x = `target` for a 2-chain x supported on `allowed`.
///
/// Independent of any incremental surface bookkeeping: this is a direct
/// linear solve, usable as an oracle against faster routes.
pub fn solve_bounded_chain(
    complex: &CubicalComplex,
    allowed: &Chain2,
    target: &Chain1,
) -> SolveOutcome {
    assert_eq!(allowed.capacity(), complex.face_count());
    assert_eq!(target.capacity(), complex.edge_count());

    let columns: Vec<u32> = allowed.iter().collect();
    let k = columns.len();
    // One equation per edge, one unknown per allowed face, augmented column k.
    let mut m = Gf2Matrix::new(complex.edge_count(), k + 1);
    for (j, &f) in columns.iter().enumerate() {
        for e in complex.face_edges(f) {
            m.set(e as usize, j, true);
        }
    }
    for e in target.iter() {
        m.set(e as usize, k, true);
    }

    let pivots = m.reduce();
    if pivots.last() == Some(&k) {
        return SolveOutcome::NoSolution;
    }
    if pivots.len() < k {
        return SolveOutcome::NonUnique;
    }
    // Full column rank: pivot i sits in column i, so x_i is row i's
    // augmented bit.
    let mut solution = complex.empty_chain2();
    for (i, &f) in columns.iter().enumerate() {
        if m.get(i, k) {
            solution.insert(f);
        }
    }
    SolveOutcome::Unique(solution)
}

/// Why a face set fails to be a 2-tree.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TwoTreeDefect {
    #[error("face count {actual} differs from 2-tree count {expected}")]
    FaceCount { expected: usize, actual: usize },
    #[error("first homology has rank {b1}, expected 0")]
    FirstHomology { b1: usize },
    #[error("second homology has rank {b2}, expected 0")]
    SecondHomology { b2: usize },
}

/// Homology computations against one complex, with the rank of ∂₁ cached
/// so repeated per-sample checks cost a single elimination each.
pub struct HomologyWorkspace<'a> {
    complex: &'a CubicalComplex,
    rank_boundary_1: usize,
}

impl<'a> HomologyWorkspace<'a> {
    pub fn new(complex: &'a CubicalComplex) -> Self {
        // Rows are edges, columns vertices; rank is orientation-free.
        let mut m = Gf2Matrix::new(complex.edge_count(), complex.vertex_count());
        for e in 0..complex.edge_count() as u32 {
            for v in complex.edge_endpoints(e) {
                m.set(e as usize, v as usize, true);
            }
        }
        HomologyWorkspace {
            complex,
            rank_boundary_1: m.rank(),
        }
    }

    pub fn complex(&self) -> &CubicalComplex {
        self.complex
    }

    pub fn rank_boundary_1(&self) -> usize {
        self.rank_boundary_1
    }

    /// Rank of ∂₂ restricted to the given face set.
    pub fn rank_boundary_2(&self, faces: &Chain2) -> usize {
        assert_eq!(faces.capacity(), self.complex.face_count());
        let mut m = Gf2Matrix::new(faces.size(), self.complex.edge_count());
        for (row, f) in faces.iter().enumerate() {
            for e in self.complex.face_edges(f) {
                m.set(row, e as usize, true);
            }
        }
        m.rank()
    }

    /// Betti numbers [b0, b1, b2] of the subcomplex with the full vertex
    /// and edge skeleton and the given faces.
    pub fn betti(&self, faces: &Chain2) -> [usize; 3] {
        let r2 = self.rank_boundary_2(faces);
        let b0 = self.complex.vertex_count() - self.rank_boundary_1;
        let cycle_space = self.complex.edge_count() - self.rank_boundary_1;
        [b0, cycle_space - r2, faces.size() - r2]
    }

    /// Checks the defining properties of a 2-tree: the face count
    /// 3n²(n+1) − n³ and trivial first and second homology.
    pub fn verify_2tree(&self, faces: &Chain2) -> Result<(), TwoTreeDefect> {
        let n = self.complex.n() as usize;
        let expected = 3 * n * n * (n + 1) - n * n * n;
        if faces.size() != expected {
            return Err(TwoTreeDefect::FaceCount {
                expected,
                actual: faces.size(),
            });
        }
        let [_, b1, b2] = self.betti(faces);
        if b1 != 0 {
            return Err(TwoTreeDefect::FirstHomology { b1 });
        }
        if b2 != 0 {
            return Err(TwoTreeDefect::SecondHomology { b2 });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Axis, LatticeSize};
    use proptest::prelude::*;

    fn complex(n: u32) -> CubicalComplex {
        CubicalComplex::new(LatticeSize::new(n).unwrap())
    }

    #[test]
    fn rank_of_small_matrices() {
        let mut ident = Gf2Matrix::new(3, 3);
        for i in 0..3 {
            ident.set(i, i, true);
        }
        assert_eq!(ident.rank(), 3);

        assert_eq!(Gf2Matrix::new(4, 7).rank(), 0);

        // rows: e1+e2, e2+e3, e1+e3 (third = sum of first two)
        let mut dep = Gf2Matrix::new(3, 3);
        dep.set(0, 0, true);
        dep.set(0, 1, true);
        dep.set(1, 1, true);
        dep.set(1, 2, true);
        dep.set(2, 0, true);
        dep.set(2, 2, true);
        assert_eq!(dep.rank(), 2);
    }

    #[test]
    fn reduce_yields_rref() {
        let mut m = Gf2Matrix::new(3, 4);
        // x0+x1 = col pattern rows
        m.set(0, 0, true);
        m.set(0, 1, true);
        m.set(1, 1, true);
        m.set(2, 3, true);
        let pivots = m.reduce();
        assert_eq!(pivots, vec![0, 1, 3]);
        // pivot columns are cleared everywhere except the pivot row
        for (i, &p) in pivots.iter().enumerate() {
            for r in 0..3 {
                assert_eq!(m.get(r, p), r == i);
            }
        }
    }

    #[test]
    fn edge_boundary_rank_counts_spanning_forest() {
        // connected 1-skeleton: rank ∂₁ = vertices − 1
        for n in [1u32, 2, 3] {
            let c = complex(n);
            let ws = HomologyWorkspace::new(&c);
            assert_eq!(ws.rank_boundary_1(), c.vertex_count() - 1);
        }
    }

    #[test]
    fn full_skeleton_betti_counts_cube_voids() {
        // all faces present: connected, simply connected, one 2-cycle per cube
        for n in [1u32, 2] {
            let c = complex(n);
            let ws = HomologyWorkspace::new(&c);
            let mut all = c.empty_chain2();
            for f in 0..c.face_count() as u32 {
                all.insert(f);
            }
            assert_eq!(ws.betti(&all), [1, 0, c.cube_count()]);
        }
    }

    #[test]
    fn five_faces_of_a_cube_form_a_2_tree() {
        let c = complex(1);
        let ws = HomologyWorkspace::new(&c);
        for omitted in 0..6u32 {
            let faces: Vec<u32> = (0..6).filter(|&f| f != omitted).collect();
            let chain = c.chain2_from_faces(&faces);
            assert_eq!(ws.verify_2tree(&chain), Ok(()));
        }
    }

    #[test]
    fn full_cube_boundary_is_not_a_2_tree() {
        let c = complex(1);
        let ws = HomologyWorkspace::new(&c);
        let all = c.chain2_from_faces(&[0, 1, 2, 3, 4, 5]);
        assert_eq!(
            ws.verify_2tree(&all),
            Err(TwoTreeDefect::FaceCount {
                expected: 5,
                actual: 6
            })
        );
    }

    #[test]
    fn enclosed_void_fails_verification() {
        // Right count (28 at n=2) but containing the whole boundary of
        // cube 0, hence b2 >= 1.
        let c = complex(2);
        let ws = HomologyWorkspace::new(&c);
        let mut faces: Vec<u32> = c.cube_faces(0).to_vec();
        for f in 0..c.face_count() as u32 {
            if faces.len() == 28 {
                break;
            }
            if !faces.contains(&f) {
                faces.push(f);
            }
        }
        let chain = c.chain2_from_faces(&faces);
        assert!(ws.verify_2tree(&chain).is_err());
    }

    #[test]
    fn bounded_solve_recovers_the_cup() {
        // Unit cube, bottom face removed: the only chain bounded by the
        // equatorial loop is the five-face cup.
        let c = complex(1);
        let bottom = c.face_id(Axis::Z, [0, 0, 0]);
        let allowed: Vec<u32> = (0..6).filter(|&f| f != bottom).collect();
        let allowed = c.chain2_from_faces(&allowed);
        match solve_bounded_chain(&c, &allowed, &c.equatorial_loop()) {
            SolveOutcome::Unique(x) => {
                assert_eq!(x.size(), 5);
                assert!(!x.contains(bottom));
                assert_eq!(c.boundary_2(&x), c.equatorial_loop());
            }
            other => panic!("expected unique solution, got {other:?}"),
        }
    }

    #[test]
    fn unrestricted_solve_is_ambiguous() {
        // With all six faces allowed, the bottom face and the cup both
        // bound the loop.
        let c = complex(1);
        let all = c.chain2_from_faces(&[0, 1, 2, 3, 4, 5]);
        assert_eq!(
            solve_bounded_chain(&c, &all, &c.equatorial_loop()),
            SolveOutcome::NonUnique
        );
    }

    #[test]
    fn side_faces_alone_cannot_bound_the_loop() {
        let c = complex(1);
        let bottom = c.face_id(Axis::Z, [0, 0, 0]);
        let top = c.face_id(Axis::Z, [0, 0, 1]);
        let sides: Vec<u32> = (0..6).filter(|&f| f != bottom && f != top).collect();
        let sides = c.chain2_from_faces(&sides);
        assert_eq!(
            solve_bounded_chain(&c, &sides, &c.equatorial_loop()),
            SolveOutcome::NoSolution
        );
    }

    proptest! {
        #[test]
        fn unique_solutions_satisfy_the_system(
            faces in proptest::collection::btree_set(0u32..36, 0..36),
        ) {
            let c = complex(2);
            let allowed_vec: Vec<u32> = faces.into_iter().collect();
            let allowed = c.chain2_from_faces(&allowed_vec);
            let target = c.equatorial_loop();
            if let SolveOutcome::Unique(x) = solve_bounded_chain(&c, &allowed, &target) {
                prop_assert_eq!(c.boundary_2(&x), target);
                for f in x.iter() {
                    prop_assert!(allowed.contains(f));
                }
            }
        }
    }
}
