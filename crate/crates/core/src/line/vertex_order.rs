use thiserror::Error;

use super::class_order::ClassOrdering;
use super::classify::ClassPartition;
use crate::graph::{DirectedGraph, Vertex};
use crate::ops::OpCounter;

/// A permutation `(v_1, ..., v_n)` of the vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexOrdering(Vec<Vertex>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ordering is not a permutation of 0..{n}")]
pub struct NotAPermutation {
    pub n: usize,
}

impl VertexOrdering {
    pub fn new(order: Vec<Vertex>, n: usize) -> Result<Self, NotAPermutation> {
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(NotAPermutation { n });
        }
        for &v in &order {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(NotAPermutation { n });
            }
        }
        Ok(Self(order))
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `position[v]` = index of `v` in the ordering.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }
}

/// `R(v) = (p, q)`: the first and last class positions (in the class
/// ordering) of classes fully contained in `in[v]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InWindowSignature(pub Vec<(usize, usize)>);

/// Orders the members of each class by `p + q` of their signature (ties by
/// `p`, then vertex id) and concatenates the class blocks.
pub fn vertex_order(
    g: &DirectedGraph,
    part: &ClassPartition,
    classes: &ClassOrdering,
) -> (VertexOrdering, InWindowSignature) {
    vertex_order_counted(g, part, classes, &mut OpCounter::new())
}

pub fn vertex_order_counted(
    g: &DirectedGraph,
    part: &ClassPartition,
    classes: &ClassOrdering,
    ops: &mut OpCounter,
) -> (VertexOrdering, InWindowSignature) {
    let n = g.n();
    let r = part.len();
    let mut rank = vec![usize::MAX; r];
    for (i, &c) in classes.0.iter().enumerate() {
        rank[c] = i;
    }
    let mut count = vec![0usize; r];
    let mut touched = Vec::new();
    let mut sig = vec![(0, 0); n];
    for v in 0..n {
        let ins = g.closed_in(v);
        ops.add(2 * ins.len());
        for &u in ins {
            let c = part.class_of[u];
            if count[c] == 0 {
                touched.push(c);
            }
            count[c] += 1;
        }
        let mut span: Option<(usize, usize)> = None;
        for &c in &touched {
            if count[c] == part.classes[c].len() {
                let i = rank[c];
                span = Some(match span {
                    None => (i, i),
                    Some((p, q)) => (p.min(i), q.max(i)),
                });
            }
            count[c] = 0;
        }
        touched.clear();
        let own = rank[part.class_of[v]];
        sig[v] = span.unwrap_or((own, own));
    }

    let mut order = Vec::with_capacity(n);
    for &c in &classes.0 {
        let start = order.len();
        order.extend_from_slice(&part.classes[c]);
        let block = &mut order[start..];
        ops.add(block.len());
        block.sort_unstable_by_key(|&v| (sig[v].0 + sig[v].1, sig[v].0, v));
    }
    (VertexOrdering(order), InWindowSignature(sig))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::six_chain;
    use crate::line::classify::classify;

    fn one_based(o: &VertexOrdering) -> Vec<usize> {
        o.as_slice().iter().map(|v| v + 1).collect()
    }

    #[test]
    fn six_chain_vertex_order() {
        let g = six_chain();
        let part = classify(&g);
        let (order, sig) = vertex_order(&g, &part, &ClassOrdering(vec![0, 1, 2, 3]));
        assert_eq!(one_based(&order), vec![1, 2, 3, 4, 5, 6]);
        // 1-based class positions: R(1) = (1,1), R(2) = (1,2), R(4) = (2,4), R(5) = (3,4)
        assert_eq!(sig.0[0], (0, 0));
        assert_eq!(sig.0[1], (0, 1));
        assert_eq!(sig.0[3], (1, 3));
        assert_eq!(sig.0[4], (2, 3));
    }

    #[test]
    fn six_chain_reversed_class_order() {
        let g = six_chain();
        let part = classify(&g);
        let (order, _) = vertex_order(&g, &part, &ClassOrdering(vec![3, 2, 1, 0]));
        assert_eq!(one_based(&order), vec![6, 5, 4, 3, 2, 1]);
    }

    #[test]
    fn complete_digraph_ties_by_id() {
        let g = DirectedGraph::new(3, 2, [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]).unwrap();
        let part = classify(&g);
        let (order, _) = vertex_order(&g, &part, &ClassOrdering(vec![0]));
        assert_eq!(order.as_slice(), &[0, 1, 2]);
    }

    #[test]
    fn permutation_check() {
        assert!(VertexOrdering::new(vec![1, 0, 2], 3).is_ok());
        assert!(VertexOrdering::new(vec![1, 1, 2], 3).is_err());
        assert!(VertexOrdering::new(vec![0, 1], 3).is_err());
    }
}
