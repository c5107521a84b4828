//! The 2-skeleton of the n×n×n cubical lattice: cells, dense indexing,
//! GF(2) chains, boundary operators, and the equatorial boundary condition.
//!
//! Vertices live at integer points of [0,n]³, so the complex contains
//! exactly n³ unit cubes. Cell ids are dense and deterministic:
//! dimension-major, then axis-major, then lexicographic anchor order,
//! where the anchor is a cell's lowest corner.

use crate::bits::Bits;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice size must be at least 1")]
    ZeroSize,
}

/// Number of unit cubes per side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeSize(u32);

impl LatticeSize {
    pub fn new(n: u32) -> Result<Self, LatticeError> {
        if n == 0 {
            Err(LatticeError::ZeroSize)
        } else {
            Ok(LatticeSize(n))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

/// Direction axis for edges, normal axis for faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    /// The two axes a cell extends along, in increasing order,
    /// given this axis as its normal (faces) or complement (edges).
    #[inline]
    fn others(self) -> (usize, usize) {
        match self {
            Axis::X => (1, 2),
            Axis::Y => (0, 2),
            Axis::Z => (0, 1),
        }
    }
}

/// A 2-chain over GF(2): membership bit per face index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain2 {
    bits: Bits,
}

/// A 1-chain over GF(2): membership bit per edge index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain1 {
    bits: Bits,
}

/// A 0-chain over GF(2): membership bit per vertex index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain0 {
    bits: Bits,
}

macro_rules! chain_impl {
    ($name:ident) => {
        impl $name {
            pub(crate) fn from_bits(bits: Bits) -> Self {
                Self { bits }
            }

            #[inline]
            pub fn contains(&self, index: u32) -> bool {
                self.bits.get(index as usize)
            }

            #[inline]
            pub fn insert(&mut self, index: u32) {
                self.bits.set(index as usize, true);
            }

            #[inline]
            pub fn toggle(&mut self, index: u32) {
                self.bits.toggle(index as usize);
            }

            /// GF(2) addition (symmetric difference): self += other.
            pub fn add_assign(&mut self, other: &Self) {
                self.bits.xor_assign(&other.bits);
            }

            /// Number of cells with coefficient 1.
            pub fn size(&self) -> usize {
                self.bits.count_ones()
            }

            pub fn is_empty(&self) -> bool {
                self.bits.is_empty()
            }

            /// Capacity: total number of cells of this dimension.
            pub fn capacity(&self) -> usize {
                self.bits.len()
            }

            /// Member cell indices, ascending.
            pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
                self.bits.iter_ones().map(|i| i as u32)
            }
        }
    };
}

chain_impl!(Chain2);
chain_impl!(Chain1);
chain_impl!(Chain0);

/// The 2-dimensional cubical complex on the vertex set [0,n]³.
///
/// Immutable after construction and freely shareable across threads.
pub struct CubicalComplex {
    size: LatticeSize,
    /// The six boundary faces of each cube, by cube index.
    cube_faces: Vec<[u32; 6]>,
}

impl CubicalComplex {
    pub fn new(size: LatticeSize) -> Self {
        let n = size.get();
        let mut cube_faces = Vec::with_capacity((n * n * n) as usize);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let mut faces = [0u32; 6];
                    let mut k = 0;
                    for axis in Axis::ALL {
                        let lo = [x, y, z];
                        let mut hi = lo;
                        hi[axis.index()] += 1;
                        faces[k] = face_id(n, axis, lo);
                        faces[k + 1] = face_id(n, axis, hi);
                        k += 2;
                    }
                    cube_faces.push(faces);
                }
            }
        }
        CubicalComplex { size, cube_faces }
    }

    #[inline]
    pub fn size(&self) -> LatticeSize {
        self.size
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.size.get()
    }

    pub fn vertex_count(&self) -> usize {
        let m = self.n() as usize + 1;
        m * m * m
    }

    pub fn edge_count(&self) -> usize {
        let n = self.n() as usize;
        3 * n * (n + 1) * (n + 1)
    }

    pub fn face_count(&self) -> usize {
        let n = self.n() as usize;
        3 * n * n * (n + 1)
    }

    pub fn cube_count(&self) -> usize {
        let n = self.n() as usize;
        n * n * n
    }

    // ---- dense id maps -------------------------------------------------

    pub fn vertex_id(&self, coords: [u32; 3]) -> u32 {
        let m = self.n() + 1;
        debug_assert!(coords.iter().all(|&c| c < m));
        (coords[0] * m + coords[1]) * m + coords[2]
    }

    pub fn vertex_coords(&self, id: u32) -> [u32; 3] {
        let m = self.n() + 1;
        [id / (m * m), id / m % m, id % m]
    }

    /// Edge along `axis` anchored at its lower endpoint.
    pub fn edge_id(&self, axis: Axis, anchor: [u32; 3]) -> u32 {
        edge_id(self.n(), axis, anchor)
    }

    pub fn edge_info(&self, id: u32) -> (Axis, [u32; 3]) {
        let n = self.n();
        let per_axis = n * (n + 1) * (n + 1);
        let axis = Axis::from_index((id / per_axis) as usize);
        let dims = cell_dims(n, axis.index(), true);
        (axis, unrank(id % per_axis, dims))
    }

    /// The two endpoint vertices of an edge.
    pub fn edge_endpoints(&self, id: u32) -> [u32; 2] {
        let (axis, anchor) = self.edge_info(id);
        let mut upper = anchor;
        upper[axis.index()] += 1;
        [self.vertex_id(anchor), self.vertex_id(upper)]
    }

    /// Face with the given normal axis anchored at its lowest corner.
    pub fn face_id(&self, normal: Axis, anchor: [u32; 3]) -> u32 {
        face_id(self.n(), normal, anchor)
    }

    pub fn face_info(&self, id: u32) -> (Axis, [u32; 3]) {
        let n = self.n();
        let per_axis = n * n * (n + 1);
        let normal = Axis::from_index((id / per_axis) as usize);
        let dims = cell_dims(n, normal.index(), false);
        (normal, unrank(id % per_axis, dims))
    }

    /// The four boundary edges of a face.
    pub fn face_edges(&self, id: u32) -> [u32; 4] {
        let n = self.n();
        let (normal, anchor) = self.face_info(id);
        let (u, v) = normal.others();
        let mut shift_u = anchor;
        shift_u[u] += 1;
        let mut shift_v = anchor;
        shift_v[v] += 1;
        [
            edge_id(n, Axis::from_index(u), anchor),
            edge_id(n, Axis::from_index(u), shift_v),
            edge_id(n, Axis::from_index(v), anchor),
            edge_id(n, Axis::from_index(v), shift_u),
        ]
    }

    /// The four corner vertices of a face, in quad order.
    pub fn face_corners(&self, id: u32) -> [[u32; 3]; 4] {
        let (normal, anchor) = self.face_info(id);
        let (u, v) = normal.others();
        let mut b = anchor;
        b[u] += 1;
        let mut c = b;
        c[v] += 1;
        let mut d = anchor;
        d[v] += 1;
        [anchor, b, c, d]
    }

    pub fn cube_id(&self, anchor: [u32; 3]) -> u32 {
        let n = self.n();
        debug_assert!(anchor.iter().all(|&c| c < n));
        (anchor[0] * n + anchor[1]) * n + anchor[2]
    }

    pub fn cube_anchor(&self, id: u32) -> [u32; 3] {
        let n = self.n();
        [id / (n * n), id / n % n, id % n]
    }

    /// The six boundary faces of a cube.
    #[inline]
    pub fn cube_faces(&self, id: u32) -> &[u32; 6] {
        &self.cube_faces[id as usize]
    }

    // ---- chains and boundaries ------------------------------------------

    pub fn empty_chain2(&self) -> Chain2 {
        Chain2::from_bits(Bits::new(self.face_count()))
    }

    pub fn empty_chain1(&self) -> Chain1 {
        Chain1::from_bits(Bits::new(self.edge_count()))
    }

    pub fn chain2_from_faces(&self, faces: &[u32]) -> Chain2 {
        let mut c = self.empty_chain2();
        for &f in faces {
            assert!((f as usize) < self.face_count(), "face index out of range");
            c.insert(f);
        }
        c
    }

    /// ∂₂: GF(2) sum of the four-edge boundaries of each member face.
    pub fn boundary_2(&self, chain: &Chain2) -> Chain1 {
        assert_eq!(chain.capacity(), self.face_count(), "chain size mismatch");
        let mut out = self.empty_chain1();
        for f in chain.iter() {
            for e in self.face_edges(f) {
                out.toggle(e);
            }
        }
        out
    }

    /// ∂₁: GF(2) sum of the endpoint pairs of each member edge.
    pub fn boundary_1(&self, chain: &Chain1) -> Chain0 {
        assert_eq!(chain.capacity(), self.edge_count(), "chain size mismatch");
        let mut bits = Bits::new(self.vertex_count());
        for e in chain.iter() {
            for v in self.edge_endpoints(e) {
                bits.toggle(v as usize);
            }
        }
        Chain0::from_bits(bits)
    }

    /// The 4n-edge loop tracing the perimeter of [0,n]² at height ⌊n/2⌋.
    pub fn equatorial_loop(&self) -> Chain1 {
        let n = self.n();
        let h = n / 2;
        let mut chain = self.empty_chain1();
        for t in 0..n {
            chain.insert(self.edge_id(Axis::X, [t, 0, h]));
            chain.insert(self.edge_id(Axis::X, [t, n, h]));
            chain.insert(self.edge_id(Axis::Y, [0, t, h]));
            chain.insert(self.edge_id(Axis::Y, [n, t, h]));
        }
        chain
    }

    /// The flat disc of n² squares spanning the equatorial loop at z = ⌊n/2⌋.
    pub fn initial_surface(&self) -> Chain2 {
        let n = self.n();
        let h = n / 2;
        let mut chain = self.empty_chain2();
        for x in 0..n {
            for y in 0..n {
                chain.insert(self.face_id(Axis::Z, [x, y, h]));
            }
        }
        chain
    }
}

/// Extents of the valid anchor range for an edge (`extends=true` along
/// `axis`) or a face (normal `axis`).
fn cell_dims(n: u32, axis: usize, is_edge: bool) -> [u32; 3] {
    let mut dims = if is_edge { [n + 1; 3] } else { [n; 3] };
    dims[axis] = if is_edge { n } else { n + 1 };
    dims
}

fn rank(anchor: [u32; 3], dims: [u32; 3]) -> u32 {
    debug_assert!(anchor.iter().zip(&dims).all(|(a, d)| a < d));
    (anchor[0] * dims[1] + anchor[1]) * dims[2] + anchor[2]
}

fn unrank(r: u32, dims: [u32; 3]) -> [u32; 3] {
    [r / (dims[1] * dims[2]), r / dims[2] % dims[1], r % dims[2]]
}

fn edge_id(n: u32, axis: Axis, anchor: [u32; 3]) -> u32 {
    let per_axis = n * (n + 1) * (n + 1);
    axis.index() as u32 * per_axis + rank(anchor, cell_dims(n, axis.index(), true))
}

fn face_id(n: u32, normal: Axis, anchor: [u32; 3]) -> u32 {
    let per_axis = n * n * (n + 1);
    normal.index() as u32 * per_axis + rank(anchor, cell_dims(n, normal.index(), false))
}
