//! Wavefront OBJ export: one quad per surface face, vertices
//! deduplicated, +Z up, unit cube edge length 1. Output is fully
//! deterministic: faces in ascending id order, vertices in first-use
//! order.

use lers::{Chain2, CubicalComplex};
use std::collections::HashMap;
use std::fmt::Write;

pub fn surface_to_obj(complex: &CubicalComplex, surface: &Chain2) -> String {
    let mut vertex_index: HashMap<[u32; 3], usize> = HashMap::new();
    let mut vertices: Vec<[u32; 3]> = Vec::new();
    let mut quads: Vec<[usize; 4]> = Vec::with_capacity(surface.size());

    for face in surface.iter() {
        let corners = complex.face_corners(face);
        let mut quad = [0usize; 4];
        for (slot, corner) in corners.into_iter().enumerate() {
            let next = vertices.len();
            let index = *vertex_index.entry(corner).or_insert_with(|| {
                vertices.push(corner);
                next
            });
            quad[slot] = index;
        }
        quads.push(quad);
    }

    let mut out = String::new();
    let _ = writeln!(out, "# loop-erased random surface, {} quads", quads.len());
    for [x, y, z] in &vertices {
        let _ = writeln!(out, "v {x} {y} {z}");
    }
    for quad in &quads {
        // OBJ indices are 1-based
        let _ = writeln!(
            out,
            "f {} {} {} {}",
            quad[0] + 1,
            quad[1] + 1,
            quad[2] + 1,
            quad[3] + 1
        );
    }
    out
}
