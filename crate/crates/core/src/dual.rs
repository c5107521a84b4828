//! The dual multigraph of the lattice: one vertex per unit cube plus a
//! single outer vertex, one edge per face.
//!
//! Dual edge ids equal face ids, so the face/edge correspondence is the
//! identity on indices. Every boundary face of the lattice becomes an
//! edge to the outer vertex, which is why parallel edges appear (at n=1
//! all six faces join the lone cube to the outside).

use crate::graph::Multigraph;
use crate::lattice::CubicalComplex;

pub struct DualGraph {
    graph: Multigraph,
    infinity: u32,
}

impl DualGraph {
    pub fn new(complex: &CubicalComplex) -> Self {
        let infinity = complex.cube_count() as u32;
        let mut edges = Vec::with_capacity(complex.face_count());
        for f in 0..complex.face_count() as u32 {
            let (below, above) = cubes_of_face(complex, f);
            edges.push((
                below.unwrap_or(infinity),
                above.unwrap_or(infinity),
            ));
        }
        DualGraph {
            graph: Multigraph::from_edges(complex.cube_count() + 1, &edges),
            infinity,
        }
    }

    #[inline]
    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    /// The outer vertex representing the unbounded region.
    #[inline]
    pub fn infinity(&self) -> u32 {
        self.infinity
    }

    /// The face crossed by a dual edge. Identity on indices by construction.
    #[inline]
    pub fn face_of_edge(&self, edge: u32) -> u32 {
        edge
    }

    #[inline]
    pub fn edge_of_face(&self, face: u32) -> u32 {
        face
    }

    #[inline]
    pub fn is_cube(&self, vertex: u32) -> bool {
        vertex != self.infinity
    }
}

/// The cubes on the negative and positive side of a face's normal,
/// `None` meaning the unbounded region.
fn cubes_of_face(complex: &CubicalComplex, face: u32) -> (Option<u32>, Option<u32>) {
    let n = complex.n();
    let (normal, anchor) = complex.face_info(face);
    let a = normal.index();
    let below = if anchor[a] > 0 {
        let mut c = anchor;
        c[a] -= 1;
        Some(complex.cube_id(c))
    } else {
        None
    };
    let above = if anchor[a] < n {
        Some(complex.cube_id(anchor))
    } else {
        None
    };
    (below, above)
}

/// Faces of `cube` whose dual edges reach the outer vertex directly, for
/// tests; interior cubes have none.
#[cfg(test)]
fn boundary_faces_of_cube(complex: &CubicalComplex, cube: u32) -> Vec<u32> {
    complex
        .cube_faces(cube)
        .iter()
        .copied()
        .filter(|&f| {
            let (b, a) = cubes_of_face(complex, f);
            b.is_none() || a.is_none()
        })
        .collect()
}
