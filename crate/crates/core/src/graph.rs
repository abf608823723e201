//! k-regular directed graphs with compressed adjacency.
//!
//! Vertices are dense `0..n` indices. File formats and the CLI use 1-based
//! ids; the translation happens in [`crate::io`].

use std::collections::VecDeque;

use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} has out-degree {degree}, expected {k}")]
    NotKRegular { vertex: Vertex, degree: usize, k: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex id {id} out of range for n = {n}")]
    IdOutOfRange { id: usize, n: usize },
}

/// A validated k-regular directed graph.
///
/// Adjacency is stored in CSR form, sorted per vertex. Both open and closed
/// neighborhoods are kept: the closed ones (`in[v]`, `out[v]`, which include
/// `v`) are what the realization algorithms consume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    k: usize,
    out_adj: Vec<Vertex>,
    closed_out: Vec<Vertex>,
    in_offsets: Vec<usize>,
    in_adj: Vec<Vertex>,
    closed_in_offsets: Vec<usize>,
    closed_in: Vec<Vertex>,
}

impl DirectedGraph {
    /// Builds a graph from 0-based edges, validating k-regularity.
    pub fn new<I>(n: usize, k: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut lists: Vec<Vec<Vertex>> = vec![Vec::with_capacity(k); n];
        for (u, v) in edges {
            for id in [u, v] {
                if id >= n {
                    return Err(GraphError::IdOutOfRange { id, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            lists[u].push(v);
        }
        let mut out_adj = Vec::with_capacity(n * k);
        for (v, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(v, w[0]));
            }
            if list.len() != k {
                return Err(GraphError::NotKRegular {
                    vertex: v,
                    degree: list.len(),
                    k,
                });
            }
            out_adj.extend_from_slice(list);
        }
        Ok(Self::from_sorted_out(n, k, out_adj))
    }

    /// Builds a graph from 1-based edges (the convention of the file formats).
    pub fn from_one_based(n: usize, k: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut zero = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for id in [u, v] {
                if id == 0 || id > n {
                    return Err(GraphError::IdOutOfRange { id, n });
                }
            }
            zero.push((u - 1, v - 1));
        }
        Self::new(n, k, zero)
    }

    fn from_sorted_out(n: usize, k: usize, out_adj: Vec<Vertex>) -> Self {
        let mut closed_out = Vec::with_capacity(n * (k + 1));
        for v in 0..n {
            let outs = &out_adj[v * k..(v + 1) * k];
            let split = outs.partition_point(|&u| u < v);
            closed_out.extend_from_slice(&outs[..split]);
            closed_out.push(v);
            closed_out.extend_from_slice(&outs[split..]);
        }

        // transpose by counting sort; sources come out sorted per target
        let mut in_offsets = vec![0usize; n + 1];
        for &v in &out_adj {
            in_offsets[v + 1] += 1;
        }
        for v in 0..n {
            in_offsets[v + 1] += in_offsets[v];
        }
        let mut cursor = in_offsets.clone();
        let mut in_adj = vec![0; out_adj.len()];
        for u in 0..n {
            for &v in &out_adj[u * k..(u + 1) * k] {
                in_adj[cursor[v]] = u;
                cursor[v] += 1;
            }
        }

        let mut closed_in_offsets = Vec::with_capacity(n + 1);
        let mut closed_in = Vec::with_capacity(in_adj.len() + n);
        closed_in_offsets.push(0);
        for v in 0..n {
            let ins = &in_adj[in_offsets[v]..in_offsets[v + 1]];
            let split = ins.partition_point(|&u| u < v);
            closed_in.extend_from_slice(&ins[..split]);
            closed_in.push(v);
            closed_in.extend_from_slice(&ins[split..]);
            closed_in_offsets.push(closed_in.len());
        }

        Self {
            n,
            k,
            out_adj,
            closed_out,
            in_offsets,
            in_adj,
            closed_in_offsets,
            closed_in,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.out_adj.len()
    }

    /// Open out-neighborhood, sorted.
    pub fn out_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.out_adj[v * self.k..(v + 1) * self.k]
    }

    /// Open in-neighborhood, sorted.
    pub fn in_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.in_adj[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// `out[v]`: `v` together with its out-neighbors, sorted, size `k + 1`.
    pub fn closed_out(&self, v: Vertex) -> &[Vertex] {
        let w = self.k + 1;
        &self.closed_out[v * w..(v + 1) * w]
    }

    /// `in[v]`: `v` together with its in-neighbors, sorted.
    pub fn closed_in(&self, v: Vertex) -> &[Vertex] {
        &self.closed_in[self.closed_in_offsets[v]..self.closed_in_offsets[v + 1]]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.out_neighbors(u).binary_search(&v).is_ok()
    }

    /// All edges `(u, v)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// Rebuilds the in-adjacency from scratch; used to check the cached transpose.
    pub fn transpose_lists(&self) -> Vec<Vec<Vertex>> {
        let mut lists = vec![Vec::new(); self.n];
        for (u, v) in self.edges() {
            lists[v].push(u);
        }
        lists
    }

    pub fn weak_components(&self) -> ComponentLabeling {
        ComponentLabeling::from_edges(self.n, self.edges())
    }

    /// Extracts the subgraph induced by `vertices`, relabeled to `0..len` in
    /// the given order. Fails unless every out-edge stays inside the set,
    /// which always holds for a weak component.
    pub fn induced(&self, vertices: &[Vertex]) -> Result<DirectedGraph, GraphError> {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::with_capacity(vertices.len() * self.k);
        for (i, &v) in vertices.iter().enumerate() {
            for &u in self.out_neighbors(v) {
                if local[u] == usize::MAX {
                    return Err(GraphError::NotKRegular {
                        vertex: i,
                        degree: self.k - 1,
                        k: self.k,
                    });
                }
                edges.push((i, local[u]));
            }
        }
        DirectedGraph::new(vertices.len(), self.k, edges)
    }
}

/// Size of the intersection of two sorted vertex slices.
pub fn intersection_size(a: &[Vertex], b: &[Vertex]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Weakly-connected components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    pub component_id: Vec<usize>,
    /// Per-component vertices in breadth-first discovery order.
    pub members: Vec<Vec<Vertex>>,
}

impl ComponentLabeling {
    /// Labels the components of the undirected shadow of `edges`. Components
    /// are numbered by their lowest vertex; members are listed in BFS order.
    pub fn from_edges<I>(n: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let mut component_id = vec![usize::MAX; n];
        let mut members = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if component_id[start] != usize::MAX {
                continue;
            }
            let id = members.len();
            let mut comp = Vec::new();
            component_id[start] = id;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &u in &adj[v] {
                    if component_id[u] == usize::MAX {
                        component_id[u] = id;
                        queue.push_back(u);
                    }
                }
            }
            members.push(comp);
        }
        Self { component_id, members }
    }

    pub fn component_count(&self) -> usize {
        self.members.len()
    }
}
