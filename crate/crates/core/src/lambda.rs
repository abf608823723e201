//! Realizability in some Euclidean space, decided by acyclicity of the
//! pair-order graph.
//!
//! The pair-order graph has one node per unordered vertex pair and an arc
//! `{v,u} -> {v,u'}` whenever `(v,u)` is an edge and `(v,u')` is not: any
//! realization must make the first pair strictly shorter than the second.
//! Arcs are generated on the fly during the depth-first search.

use thiserror::Error;

use crate::graph::{DirectedGraph, Vertex};

/// Default cap on `n` for [`lambda_acyclic`].
pub const DEFAULT_MAX_VERTICES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LambdaError {
    #[error("pair-order graph over {n} vertices exceeds the cap of {cap}")]
    ResourceLimit { n: usize, cap: usize },
}

/// An unordered vertex pair, stored with `0 < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair(pub Vertex, pub Vertex);

impl Pair {
    pub fn new(a: Vertex, b: Vertex) -> Self {
        assert_ne!(a, b, "pair of equal vertices");
        if a < b {
            Pair(a, b)
        } else {
            Pair(b, a)
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0 == v || self.1 == v
    }

    pub fn other(&self, v: Vertex) -> Vertex {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaOutcome {
    /// Every pair, in an order consistent with all constraints (shortest first).
    Realizable(Vec<Pair>),
    /// A closed walk `p_0 -> p_1 -> ... -> p_{m-1} -> p_0` of constraint arcs.
    NotRealizable(Vec<Pair>),
}

impl LambdaOutcome {
    pub fn is_realizable(&self) -> bool {
        matches!(self, LambdaOutcome::Realizable(_))
    }
}

/// Whether `from -> to` is an arc of the pair-order graph of `g`.
pub fn is_constraint_arc(g: &DirectedGraph, from: Pair, to: Pair) -> bool {
    if from == to {
        return false;
    }
    // the two pairs share the pivot vertex v
    [from.0, from.1].into_iter().any(|v| {
        if !to.contains(v) {
            return false;
        }
        let (u, w) = (from.other(v), to.other(v));
        g.has_edge(v, u) && !g.has_edge(v, w)
    })
}

/// Checks that `cycle` is a closed walk of arcs, independently of the search.
pub fn verify_pair_cycle(g: &DirectedGraph, cycle: &[Pair]) -> bool {
    cycle.len() >= 2 && (0..cycle.len()).all(|i| is_constraint_arc(g, cycle[i], cycle[(i + 1) % cycle.len()]))
}

struct PairIndex {
    n: usize,
}

impl PairIndex {
    fn count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    fn id(&self, p: Pair) -> usize {
        // row-major upper triangle
        let (a, b) = (p.0, p.1);
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    #[cfg(test)]
    fn pair(&self, mut id: usize) -> Pair {
        let mut a = 0;
        loop {
            let row = self.n - a - 1;
            if id < row {
                return Pair(a, a + 1 + id);
            }
            id -= row;
            a += 1;
        }
    }
}

/// Cursor over the out-arcs of one pair node: for each pivot end `v` with
/// `(v, u)` an edge, every `w` outside `out[v]`.
#[derive(Clone, Copy)]
struct ArcCursor {
    pair: Pair,
    side: u8,
    next_w: Vertex,
}

impl ArcCursor {
    fn new(pair: Pair) -> Self {
        Self {
            pair,
            side: 0,
            next_w: 0,
        }
    }

    fn next(&mut self, g: &DirectedGraph) -> Option<Pair> {
        while self.side < 2 {
            let (v, u) = if self.side == 0 {
                (self.pair.0, self.pair.1)
            } else {
                (self.pair.1, self.pair.0)
            };
            if g.has_edge(v, u) {
                while self.next_w < g.n() {
                    let w = self.next_w;
                    self.next_w += 1;
                    if w != v && w != u && !g.has_edge(v, w) {
                        return Some(Pair::new(v, w));
                    }
                }
            }
            self.side += 1;
            self.next_w = 0;
        }
        None
    }
}

/// Decides acyclicity of the pair-order graph with an iterative DFS.
pub fn lambda_acyclic(g: &DirectedGraph) -> Result<LambdaOutcome, LambdaError> {
    lambda_acyclic_capped(g, DEFAULT_MAX_VERTICES)
}

pub fn lambda_acyclic_capped(g: &DirectedGraph, cap: usize) -> Result<LambdaOutcome, LambdaError> {
    let n = g.n();
    if n > cap {
        return Err(LambdaError::ResourceLimit { n, cap });
    }
    if n < 2 {
        return Ok(LambdaOutcome::Realizable(Vec::new()));
    }
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let index = PairIndex { n };
    let mut color = vec![WHITE; index.count()];
    let mut postorder = Vec::with_capacity(index.count());
    let mut stack: Vec<ArcCursor> = Vec::new();

    let roots = (0..n).flat_map(|a| (a + 1..n).map(move |b| Pair(a, b)));
    for root in roots {
        let root_id = index.id(root);
        if color[root_id] != WHITE {
            continue;
        }
        color[root_id] = GRAY;
        stack.push(ArcCursor::new(root));
        while let Some(top) = stack.last_mut() {
            match top.next(g) {
                Some(next) => {
                    let id = index.id(next);
                    match color[id] {
                        WHITE => {
                            color[id] = GRAY;
                            stack.push(ArcCursor::new(next));
                        }
                        GRAY => {
                            let start = stack.iter().position(|c| c.pair == next).expect("gray pair on stack");
                            let cycle = stack[start..].iter().map(|c| c.pair).collect();
                            return Ok(LambdaOutcome::NotRealizable(cycle));
                        }
                        _ => {}
                    }
                }
                None => {
                    let done = stack.pop().expect("non-empty");
                    color[index.id(done.pair)] = BLACK;
                    postorder.push(done.pair);
                }
            }
        }
    }
    // arcs point from shorter to longer pairs; reverse postorder is topological
    postorder.reverse();
    Ok(LambdaOutcome::Realizable(postorder))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::six_chain;

    fn three_cycle() -> DirectedGraph {
        DirectedGraph::new(3, 1, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    /// Materializes every arc from the definition (all distinct triples).
    fn explicit_arcs(g: &DirectedGraph) -> Vec<(Pair, Pair)> {
        let n = g.n();
        let mut arcs = Vec::new();
        for v in 0..n {
            for u in 0..n {
                for w in 0..n {
                    if v != u && u != w && v != w && g.has_edge(v, u) && !g.has_edge(v, w) {
                        arcs.push((Pair::new(v, u), Pair::new(v, w)));
                    }
                }
            }
        }
        arcs
    }

    fn explicit_is_acyclic(g: &DirectedGraph) -> bool {
        // Kahn's algorithm on the materialized graph
        let n = g.n();
        let pairs: Vec<Pair> = (0..n).flat_map(|a| (a + 1..n).map(move |b| Pair(a, b))).collect();
        let pos = |p: Pair| pairs.iter().position(|&q| q == p).unwrap();
        let mut indeg = vec![0usize; pairs.len()];
        let mut adj = vec![Vec::new(); pairs.len()];
        for (a, b) in explicit_arcs(g) {
            adj[pos(a)].push(pos(b));
            indeg[pos(b)] += 1;
        }
        let mut queue: Vec<usize> = (0..pairs.len()).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = queue.pop() {
            seen += 1;
            for &j in &adj[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push(j);
                }
            }
        }
        seen == pairs.len()
    }

    #[test]
    fn pair_index_round_trips() {
        let index = PairIndex { n: 7 };
        for id in 0..index.count() {
            assert_eq!(index.id(index.pair(id)), id);
        }
    }

    #[test]
    fn three_cycle_is_refuted() {
        let g = three_cycle();
        assert!(!explicit_is_acyclic(&g));
        let LambdaOutcome::NotRealizable(cycle) = lambda_acyclic(&g).unwrap() else {
            panic!("expected a cycle");
        };
        assert_eq!(cycle, vec![Pair(0, 1), Pair(0, 2), Pair(1, 2)]);
        assert!(verify_pair_cycle(&g, &cycle));
    }

    #[test]
    fn two_vertices_vacuous() {
        let g = DirectedGraph::new(2, 1, [(0, 1), (1, 0)]).unwrap();
        assert!(explicit_arcs(&g).is_empty());
        assert!(lambda_acyclic(&g).unwrap().is_realizable());
    }

    #[test]
    fn six_chain_is_acyclic_and_order_is_topological() {
        let g = six_chain();
        assert!(explicit_is_acyclic(&g));
        let LambdaOutcome::Realizable(order) = lambda_acyclic(&g).unwrap() else {
            panic!("expected an order");
        };
        assert_eq!(order.len(), 15);
        let rank = |p: Pair| order.iter().position(|&q| q == p).unwrap();
        for (a, b) in explicit_arcs(&g) {
            assert!(rank(a) < rank(b));
        }
    }

    #[test]
    fn resource_cap() {
        assert_eq!(
            lambda_acyclic_capped(&six_chain(), 5).unwrap_err(),
            LambdaError::ResourceLimit { n: 6, cap: 5 }
        );
    }

    #[test]
    fn arc_predicate_rejects_non_arcs() {
        let g = three_cycle();
        assert!(is_constraint_arc(&g, Pair(0, 1), Pair(0, 2)));
        assert!(!is_constraint_arc(&g, Pair(0, 2), Pair(0, 1)));
        assert!(!verify_pair_cycle(&g, &[Pair(0, 1)]));
    }
}
