//! Uniform spanning tree samplers on finite multigraphs, plus exact tree
//! counting via the matrix-tree theorem.
//!
//! Aldous–Broder is the workhorse: it exposes a step visitor so callers
//! can react to the walk without materializing it. Wilson's algorithm is
//! the independent cross-check; both target the uniform measure.

use crate::graph::Multigraph;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum UstError {
    /// The walk exceeded its step cap, the nontermination guard for
    /// disconnected graphs and broken inputs.
    #[error("random walk exceeded the step cap of {cap} steps")]
    StepCapExceeded { cap: u64 },
    #[error("walk vertices {from} and {to} at position {index} are not adjacent")]
    NonAdjacentStep { from: u32, to: u32, index: usize },
}

/// One observable event of an Aldous–Broder run, emitted in walk order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepEvent {
    /// The walk traversed `edge` from `from` to `to`.
    Move { edge: u32, from: u32, to: u32 },
    /// The traversal discovered `new`, adding `edge` to the tree.
    /// Fires exactly |V| − 1 times per run, right after its Move.
    TreeEdgeAdded { edge: u32, existing: u32, new: u32 },
}

pub trait StepVisitor {
    fn on_event(&mut self, event: StepEvent);
}

/// Visitor that ignores every event.
pub struct NoopVisitor;

impl StepVisitor for NoopVisitor {
    fn on_event(&mut self, _: StepEvent) {}
}

/// A rooted spanning tree. Edge ids index into the host graph; the
/// parent structure points toward the root.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    root: u32,
    /// Tree edges in discovery order.
    edges: Vec<u32>,
    /// parent[v] = (parent vertex, connecting edge); None at the root.
    parent: Vec<Option<(u32, u32)>>,
}

impl SpanningTree {
    #[inline]
    pub fn root(&self) -> u32 {
        self.root
    }

    #[inline]
    pub fn edges(&self) -> &[u32] {
        &self.edges
    }

    #[inline]
    pub fn parent(&self, vertex: u32) -> Option<(u32, u32)> {
        self.parent[vertex as usize]
    }

    /// Edge ids sorted ascending: a canonical identity for frequency
    /// counting, independent of discovery order.
    pub fn canonical_edges(&self) -> Vec<u32> {
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        edges
    }

    /// Checks edge count, acyclicity, and spanning against the host graph.
    pub fn validate(&self, graph: &Multigraph) -> bool {
        let n = graph.vertex_count();
        if self.edges.len() + 1 != n || self.parent.len() != n {
            return false;
        }
        // union-find: n-1 edges with no cycle must span
        let mut uf: Vec<u32> = (0..n as u32).collect();
        fn find(uf: &mut [u32], mut v: u32) -> u32 {
            while uf[v as usize] != v {
                uf[v as usize] = uf[uf[v as usize] as usize];
                v = uf[v as usize];
            }
            v
        }
        for &e in &self.edges {
            let (u, v) = graph.endpoints(e);
            let (ru, rv) = (find(&mut uf, u), find(&mut uf, v));
            if ru == rv {
                return false;
            }
            uf[ru as usize] = rv;
        }
        true
    }
}

/// Default nontermination guard: 10⁴ · |V| · log₂(|V| + 1) steps.
pub fn default_step_cap(vertex_count: usize) -> u64 {
    let v = vertex_count as f64;
    (1e4 * v * (v + 1.0).log2()).ceil() as u64
}

/// Aldous–Broder with the default step cap. See
/// [`aldous_broder_with_cap`].
pub fn aldous_broder<R: Rng, V: StepVisitor>(
    graph: &Multigraph,
    start: u32,
    rng: &mut R,
    visitor: &mut V,
) -> Result<(SpanningTree, u64), UstError> {
    aldous_broder_with_cap(graph, start, rng, visitor, default_step_cap(graph.vertex_count()))
}

/// Runs a random walk from `start` until it has covered the graph; the
/// first-entry edge of each vertex forms a uniform spanning tree.
///
/// Each step draws a uniform incident edge-slot, so parallel edges get
/// their full multiplicity. Returns the tree and the number of walk
/// steps taken.
pub fn aldous_broder_with_cap<R: Rng, V: StepVisitor>(
    graph: &Multigraph,
    start: u32,
    rng: &mut R,
    visitor: &mut V,
    cap: u64,
) -> Result<(SpanningTree, u64), UstError> {
    let n = graph.vertex_count();
    let mut parent: Vec<Option<(u32, u32)>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut edges = Vec::with_capacity(n - 1);
    visited[start as usize] = true;
    let mut remaining = n - 1;
    let mut current = start;
    let mut steps = 0u64;

    while remaining > 0 {
        if steps == cap {
            return Err(UstError::StepCapExceeded { cap });
        }
        steps += 1;
        let slots = graph.incident_slots(current);
        let (edge, next) = slots[rng.random_range(0..slots.len())];
        visitor.on_event(StepEvent::Move {
            edge,
            from: current,
            to: next,
        });
        if !visited[next as usize] {
            visited[next as usize] = true;
            parent[next as usize] = Some((current, edge));
            edges.push(edge);
            remaining -= 1;
            visitor.on_event(StepEvent::TreeEdgeAdded {
                edge,
                existing: current,
                new: next,
            });
        }
        current = next;
    }

    let tree = SpanningTree {
        root: start,
        edges,
        parent,
    };
    debug_assert!(tree.validate(graph));
    Ok((tree, steps))
}

/// Wilson's algorithm with the default step cap.
pub fn wilson<R: Rng>(
    graph: &Multigraph,
    root: u32,
    rng: &mut R,
) -> Result<(SpanningTree, u64), UstError> {
    wilson_with_cap(graph, root, rng, default_step_cap(graph.vertex_count()))
}

/// Builds a uniform spanning tree by stitching loop-erased random walks
/// into the growing tree, starting from `root`.
///
/// Loop erasure happens implicitly: each vertex remembers only its most
/// recent outgoing edge, and the retrace from the walk's origin follows
/// exactly the erased path.
pub fn wilson_with_cap<R: Rng>(
    graph: &Multigraph,
    root: u32,
    rng: &mut R,
    cap: u64,
) -> Result<(SpanningTree, u64), UstError> {
    let n = graph.vertex_count();
    let mut in_tree = vec![false; n];
    let mut next: Vec<Option<(u32, u32)>> = vec![None; n];
    in_tree[root as usize] = true;
    let mut steps = 0u64;

    for v in 0..n as u32 {
        if in_tree[v as usize] {
            continue;
        }
        let mut u = v;
        while !in_tree[u as usize] {
            if steps == cap {
                return Err(UstError::StepCapExceeded { cap });
            }
            steps += 1;
            let slots = graph.incident_slots(u);
            let slot = slots[rng.random_range(0..slots.len())];
            next[u as usize] = Some(slot);
            u = slot.1;
        }
        let mut u = v;
        while !in_tree[u as usize] {
            in_tree[u as usize] = true;
            u = next[u as usize].unwrap().1;
        }
    }

    // assemble parent pointers toward the root from the retained edges
    let mut parent: Vec<Option<(u32, u32)>> = vec![None; n];
    let mut edges = Vec::with_capacity(n - 1);
    for v in 0..n as u32 {
        if v != root {
            let (edge, to) = next[v as usize].expect("non-root vertex joined via a walk");
            parent[v as usize] = Some((to, edge));
            edges.push(edge);
        }
    }
    let tree = SpanningTree {
        root,
        edges,
        parent,
    };
    debug_assert!(tree.validate(graph));
    Ok((tree, steps))
}

/// Chronological loop erasure: each time a vertex repeats, the cycle
/// since its first occurrence is removed. The result is self-avoiding
/// and prefix-stable.
pub fn loop_erase(graph: &Multigraph, walk: &[u32]) -> Result<Vec<u32>, UstError> {
    let mut path: Vec<u32> = Vec::with_capacity(walk.len());
    let mut position = std::collections::HashMap::new();
    for (i, &v) in walk.iter().enumerate() {
        if i > 0 {
            let prev = walk[i - 1];
            let adjacent = graph.incident_slots(prev).iter().any(|&(_, w)| w == v);
            if !adjacent {
                return Err(UstError::NonAdjacentStep {
                    from: prev,
                    to: v,
                    index: i,
                });
            }
        }
        if let Some(&at) = position.get(&v) {
            for dropped in path.drain(at + 1..) {
                position.remove(&dropped);
            }
        } else {
            position.insert(v, path.len());
            path.push(v);
        }
    }
    Ok(path)
}

/// Exact spanning-tree count via the matrix-tree theorem: any cofactor
/// of the Laplacian, computed with fraction-free Bareiss elimination.
pub fn count_spanning_trees(graph: &Multigraph) -> BigInt {
    let n = graph.vertex_count();
    if n <= 1 {
        return BigInt::one();
    }
    // reduced Laplacian: drop the row and column of vertex 0
    let k = n - 1;
    let mut m = vec![vec![BigInt::zero(); k]; k];
    for e in 0..graph.edge_count() as u32 {
        let (u, v) = graph.endpoints(e);
        let (u, v) = (u as usize, v as usize);
        if u > 0 {
            m[u - 1][u - 1] += 1;
        }
        if v > 0 {
            m[v - 1][v - 1] += 1;
        }
        if u > 0 && v > 0 {
            m[u - 1][v - 1] -= 1;
            m[v - 1][u - 1] -= 1;
        }
    }
    bareiss_determinant(m)
}

/// Fraction-free determinant; all divisions are exact in ℤ.
fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let k = m.len();
    if k == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for p in 0..k - 1 {
        if m[p][p].is_zero() {
            let Some(swap) = (p + 1..k).find(|&r| !m[r][p].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(p, swap);
            sign = -sign;
        }
        for i in p + 1..k {
            for j in p + 1..k {
                let numerator = &m[i][j] * &m[p][p] - &m[i][p] * &m[p][j];
                m[i][j] = numerator / &prev;
            }
            m[i][p] = BigInt::zero();
        }
        prev = m[p][p].clone();
    }
    sign * m[k - 1][k - 1].clone()
}
