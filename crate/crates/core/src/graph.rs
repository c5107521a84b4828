//! Undirected multigraphs with stable edge ids and CSR adjacency.
//!
//! Parallel edges are first-class: each edge keeps its own id and its own
//! adjacency slot, so a uniform choice among a vertex's slots weights
//! neighbors by edge multiplicity. Random-walk samplers depend on that.

/// An immutable undirected multigraph. Self-loops are not allowed.
#[derive(Clone, Debug)]
pub struct Multigraph {
    endpoints: Vec<(u32, u32)>,
    /// CSR offsets into `incident`, length vertex_count + 1.
    offsets: Vec<u32>,
    /// Incidence slots (edge id, opposite endpoint), grouped by vertex.
    incident: Vec<(u32, u32)>,
}

impl Multigraph {
    /// Builds from an edge list. Edge ids follow list order.
    pub fn from_edges(vertex_count: usize, edges: &[(u32, u32)]) -> Self {
        let mut degrees = vec![0u32; vertex_count];
        for &(u, v) in edges {
            assert!(u != v, "self-loops are not supported");
            assert!(
                (u as usize) < vertex_count && (v as usize) < vertex_count,
                "endpoint out of range"
            );
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        let mut acc = 0u32;
        offsets.push(0);
        for &d in &degrees {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor: Vec<u32> = offsets[..vertex_count].to_vec();
        let mut incident = vec![(0u32, 0u32); 2 * edges.len()];
        for (id, &(u, v)) in edges.iter().enumerate() {
            incident[cursor[u as usize] as usize] = (id as u32, v);
            cursor[u as usize] += 1;
            incident[cursor[v as usize] as usize] = (id as u32, u);
            cursor[v as usize] += 1;
        }
        Multigraph {
            endpoints: edges.to_vec(),
            offsets,
            incident,
        }
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    #[inline]
    pub fn endpoints(&self, edge: u32) -> (u32, u32) {
        self.endpoints[edge as usize]
    }

    /// The endpoint of `edge` that is not `vertex`.
    #[inline]
    pub fn other_endpoint(&self, edge: u32, vertex: u32) -> u32 {
        let (u, v) = self.endpoints(edge);
        debug_assert!(vertex == u || vertex == v);
        u ^ v ^ vertex
    }

    #[inline]
    pub fn degree(&self, vertex: u32) -> usize {
        let v = vertex as usize;
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    /// Incidence slots of `vertex`: one (edge id, neighbor) pair per
    /// incident edge, parallel edges each contributing a slot.
    #[inline]
    pub fn incident_slots(&self, vertex: u32) -> &[(u32, u32)] {
        let v = vertex as usize;
        &self.incident[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut visited = 1;
        while let Some(v) = stack.pop() {
            for &(_, w) in self.incident_slots(v) {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    visited += 1;
                    stack.push(w);
                }
            }
        }
        visited == n
    }

    // ---- small builders for tests and cross-checks ----------------------

    /// Two vertices joined by `k` parallel edges.
    pub fn banana(k: usize) -> Self {
        Multigraph::from_edges(2, &vec![(0, 1); k])
    }

    /// Simple path 0 - 1 - ... - (k-1).
    pub fn path(k: usize) -> Self {
        assert!(k >= 1);
        let edges: Vec<_> = (1..k as u32).map(|i| (i - 1, i)).collect();
        Multigraph::from_edges(k, &edges)
    }

    /// Simple cycle on k >= 3 vertices.
    pub fn cycle(k: usize) -> Self {
        assert!(k >= 3);
        let mut edges: Vec<_> = (1..k as u32).map(|i| (i - 1, i)).collect();
        edges.push((k as u32 - 1, 0));
        Multigraph::from_edges(k, &edges)
    }

    /// Complete simple graph on k vertices.
    pub fn complete(k: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..k as u32 {
            for v in (u + 1)..k as u32 {
                edges.push((u, v));
            }
        }
        Multigraph::from_edges(k, &edges)
    }
}
