use num::rational::Ratio;

use crate::graph::{ComponentLabeling, DirectedGraph, Vertex};

/// Simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    adj: Vec<Vec<Vertex>>,
}

impl UndirectedGraph {
    /// Self-loops and repeated edges are dropped.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Self { adj }
    }

    /// The undirected shadow of a digraph.
    pub fn shadow(g: &DirectedGraph) -> Self {
        Self::new(g.n(), g.edges())
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    /// Each edge once, as `(a, b)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    pub fn components(&self) -> ComponentLabeling {
        ComponentLabeling::from_edges(self.n(), self.edges())
    }

    fn induced(&self, vertices: &[Vertex]) -> Self {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let edges = vertices.iter().enumerate().flat_map(|(i, &v)| {
            let local = &local;
            self.adj[v]
                .iter()
                .filter(move |&&u| local[u] != usize::MAX)
                .map(move |&u| (i, local[u]))
        });
        Self::new(vertices.len(), edges.collect::<Vec<_>>())
    }
}

/// Number of BFS seeds tried per cut, one of which is pseudo-peripheral.
pub const CUT_SEEDS: usize = 16;

/// Heuristic balanced edge separator: every component of `h` minus the
/// returned edges has at most `⌈n/2⌉` vertices. Edges come back as
/// `(a, b)` with `a < b`, sorted.
///
/// Only the (unique) oversized component is split. Breadth-first regions are
/// grown from several seeds; each region prefix whose size keeps both sides
/// within the bound is a candidate, and the one with the fewest crossing
/// edges wins. A single pass of gain-positive vertex moves then polishes it.
pub fn approx_min_balanced_cut(h: &UndirectedGraph) -> Vec<(Vertex, Vertex)> {
    let n = h.n();
    let half = n.div_ceil(2);
    let labels = h.components();
    let Some(comp) = labels.members.iter().max_by_key(|c| c.len()) else {
        return Vec::new();
    };
    if comp.len() <= half {
        return Vec::new();
    }
    let mut comp = comp.clone();
    comp.sort_unstable();
    let c = comp.len();
    let (lo, hi) = (c - half, half);

    let mut seeds = vec![pseudo_peripheral(h, comp[0])];
    let stride = c.div_ceil(CUT_SEEDS - 1).max(1);
    seeds.extend(comp.iter().step_by(stride).copied());
    seeds.truncate(CUT_SEEDS);
    seeds.dedup();

    let mut in_r = vec![false; n];
    let mut best: Option<(usize, Vec<Vertex>)> = None;
    for &seed in &seeds {
        let order = bfs_order(h, seed);
        let mut cut = 0usize;
        let mut best_here: Option<(usize, usize)> = None;
        for (t, &x) in order.iter().enumerate().take(hi) {
            let inside = h.neighbors(x).iter().filter(|&&y| in_r[y]).count();
            cut = cut + h.neighbors(x).len() - 2 * inside;
            in_r[x] = true;
            if t + 1 >= lo && best_here.is_none_or(|(b, _)| cut < b) {
                best_here = Some((cut, t + 1));
            }
        }
        for &x in order.iter().take(hi) {
            in_r[x] = false;
        }
        if let Some((cut, len)) = best_here {
            if best.as_ref().is_none_or(|(b, _)| cut < *b) {
                best = Some((cut, order[..len].to_vec()));
            }
        }
    }
    let (_, region) = best.expect("a connected component yields BFS candidates");
    for &x in &region {
        in_r[x] = true;
    }
    let mut size = region.len();
    for &x in &comp {
        let same = h.neighbors(x).iter().filter(|&&y| in_r[y] == in_r[x]).count();
        let other = h.neighbors(x).len() - same;
        let new_size = if in_r[x] { size - 1 } else { size + 1 };
        if other > same && (lo..=hi).contains(&new_size) {
            in_r[x] = !in_r[x];
            size = new_size;
        }
    }
    let mut cut: Vec<(Vertex, Vertex)> = comp
        .iter()
        .flat_map(|&a| h.neighbors(a).iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
        .filter(|&(a, b)| in_r[a] != in_r[b])
        .collect();
    cut.sort_unstable();

    let rest = UndirectedGraph::new(
        n,
        h.edges().filter(|e| cut.binary_search(e).is_err()).collect::<Vec<_>>(),
    );
    assert!(
        rest.components().members.iter().all(|m| m.len() <= half),
        "balanced cut left an oversized component"
    );
    cut
}

fn bfs_order(h: &UndirectedGraph, start: Vertex) -> Vec<Vertex> {
    let mut seen = vec![false; h.n()];
    let mut order = vec![start];
    seen[start] = true;
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &u in h.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                order.push(u);
            }
        }
    }
    order
}

/// Last vertex of a BFS from the last vertex of a BFS from `start`.
fn pseudo_peripheral(h: &UndirectedGraph, start: Vertex) -> Vertex {
    let far = *bfs_order(h, start).last().expect("non-empty");
    *bfs_order(h, far).last().expect("non-empty")
}

/// Edges removed by recursive balanced cutting and what is left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutResult {
    /// Directed edges of `G`, sorted.
    pub removed_edges: Vec<(Vertex, Vertex)>,
    /// Weak components of `G` minus the removed edges.
    pub components: ComponentLabeling,
    pub removed_fraction: Ratio<u64>,
    /// The removed fraction exceeds `eps`. The result is still usable but
    /// no longer certifies anything about realizability.
    pub threshold_exceeded: bool,
    pub size_cap: usize,
}

/// The default component size cap `max(k + 2, ⌈1/eps⌉ (k + 1))`.
pub fn default_size_cap(k: usize, eps: f64) -> usize {
    let inv = (1.0 / eps).ceil() as usize;
    (k + 2).max(inv.saturating_mul(k + 1))
}

/// Recursively splits the undirected shadow of `g` with balanced cuts until
/// every component has at most `size_cap` vertices, then maps the cut back
/// to directed edges (both directions of a cut pair are removed).
pub fn cut_edges(g: &DirectedGraph, eps: f64, size_cap: usize) -> CutResult {
    assert!(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
    let size_cap = size_cap.max(1);
    let shadow = UndirectedGraph::shadow(g);
    let mut cut_pairs: Vec<(Vertex, Vertex)> = Vec::new();
    let mut pending: Vec<Vec<Vertex>> = shadow.components().members;
    while let Some(mut part) = pending.pop() {
        if part.len() <= size_cap {
            continue;
        }
        part.sort_unstable();
        let h = shadow.induced(&part);
        let cut = approx_min_balanced_cut(&h);
        cut_pairs.extend(cut.iter().map(|&(a, b)| (part[a], part[b])));
        let rest = UndirectedGraph::new(
            h.n(),
            h.edges().filter(|e| cut.binary_search(e).is_err()).collect::<Vec<_>>(),
        );
        for m in rest.components().members {
            pending.push(m.into_iter().map(|i| part[i]).collect());
        }
    }
    cut_pairs.sort_unstable();
    let removed_edges: Vec<(Vertex, Vertex)> = g
        .edges()
        .filter(|&(u, v)| cut_pairs.binary_search(&(u.min(v), u.max(v))).is_ok())
        .collect();
    let kept = g.edges().filter(|e| removed_edges.binary_search(e).is_err());
    let components = ComponentLabeling::from_edges(g.n(), kept);
    assert!(
        components.members.iter().all(|m| m.len() <= size_cap),
        "component above the size cap"
    );
    let total = g.edge_count();
    let removed_fraction = if total == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(removed_edges.len() as u64, total as u64)
    };
    let threshold_exceeded = removed_edges.len() as f64 > eps * total as f64;
    CutResult {
        removed_edges,
        components,
        removed_fraction,
        threshold_exceeded,
        size_cap,
    }
}
