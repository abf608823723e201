use super::vertex_order::VertexOrdering;
use crate::graph::{DirectedGraph, Vertex};
use crate::ops::OpCounter;

/// Result of checking that every closed out-neighborhood is a contiguous
/// window of the ordering and that window starts never decrease.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition1 {
    /// `window_start[i]` (0-based) is where the window of the `i`-th vertex in
    /// the ordering begins: `out[v_i] = {v_s, ..., v_{s+k}}`.
    Feasible { window_start: Vec<usize> },
    /// The first vertex (in ordering position) whose window is broken or
    /// starts before its predecessor's.
    Infeasible { witness: Vertex },
}

impl Condition1 {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Condition1::Feasible { .. })
    }
}

/// `O(kn)` check. Feasible here is equivalent to the ordering admitting a
/// realization on the line with strictly increasing coordinates.
pub fn check_condition1(g: &DirectedGraph, order: &VertexOrdering) -> Condition1 {
    check_condition1_counted(g, order, &mut OpCounter::new())
}

pub fn check_condition1_counted(g: &DirectedGraph, order: &VertexOrdering, ops: &mut OpCounter) -> Condition1 {
    let k = g.k();
    let pos = order.positions();
    let mut starts = Vec::with_capacity(order.len());
    for &v in order.as_slice() {
        let window = g.closed_out(v);
        ops.add(window.len());
        let (lo, hi) = window
            .iter()
            .fold((usize::MAX, 0), |(lo, hi), &u| (lo.min(pos[u]), hi.max(pos[u])));
        // k + 1 distinct positions spanning exactly k are contiguous
        if hi - lo != k || starts.last().is_some_and(|&prev| lo < prev) {
            return Condition1::Infeasible { witness: v };
        }
        starts.push(lo);
    }
    Condition1::Feasible { window_start: starts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::six_chain;

    fn ordering(one_based: &[usize]) -> VertexOrdering {
        VertexOrdering::new(one_based.iter().map(|v| v - 1).collect(), one_based.len()).unwrap()
    }

    fn starts_one_based(c: &Condition1) -> Vec<usize> {
        match c {
            Condition1::Feasible { window_start } => window_start.iter().map(|s| s + 1).collect(),
            Condition1::Infeasible { .. } => panic!("expected feasible"),
        }
    }

    #[test]
    fn six_chain_windows() {
        let g = six_chain();
        let c = check_condition1(&g, &ordering(&[1, 2, 3, 4, 5, 6]));
        assert_eq!(starts_one_based(&c), vec![1, 1, 2, 3, 3, 4]);
        let reversed = check_condition1(&g, &ordering(&[6, 5, 4, 3, 2, 1]));
        assert_eq!(starts_one_based(&reversed), vec![1, 2, 2, 3, 4, 4]);
        // 3's window {2,3,4} is split by swapping 1 and 2
        assert!(!check_condition1(&g, &ordering(&[2, 1, 3, 4, 5, 6])).is_feasible());
    }

    #[test]
    fn six_chain_bad_order() {
        let g = six_chain();
        assert!(!check_condition1(&g, &ordering(&[1, 3, 2, 4, 5, 6])).is_feasible());
    }

    #[test]
    fn star_in_fails_every_ordering() {
        let g = DirectedGraph::from_one_based(4, 1, &[(1, 2), (2, 1), (3, 1), (4, 1)]).unwrap();
        let mut perm = vec![0, 1, 2, 3];
        let mut count = 0;
        permute(&mut perm, 0, &mut |p| {
            count += 1;
            let vo = VertexOrdering::new(p.to_vec(), 4).unwrap();
            assert!(!check_condition1(&g, &vo).is_feasible());
        });
        assert_eq!(count, 24);
    }

    pub(crate) fn permute(items: &mut [usize], at: usize, visit: &mut dyn FnMut(&[usize])) {
        if at == items.len() {
            visit(items);
            return;
        }
        for i in at..items.len() {
            items.swap(at, i);
            permute(items, at + 1, visit);
            items.swap(at, i);
        }
    }
}
