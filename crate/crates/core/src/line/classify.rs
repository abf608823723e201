use crate::graph::{intersection_size, DirectedGraph, Vertex};
use crate::ops::OpCounter;

/// Partition of the vertices into classes of (claimed) equal closed
/// out-neighborhoods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    /// Classes sorted by their smallest member; members sorted.
    pub classes: Vec<Vec<Vertex>>,
    pub class_of: Vec<usize>,
}

impl ClassPartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// `out[C]`, read from the class's first member.
    pub fn out_window<'g>(&self, g: &'g DirectedGraph, class: usize) -> &'g [Vertex] {
        g.closed_out(self.classes[class][0])
    }

    fn from_classes(n: usize, mut classes: Vec<Vec<Vertex>>) -> Self {
        for c in &mut classes {
            c.sort_unstable();
        }
        classes.sort_unstable_by_key(|c| c[0]);
        let mut class_of = vec![usize::MAX; n];
        for (id, c) in classes.iter().enumerate() {
            for &v in c {
                class_of[v] = id;
            }
        }
        Self { classes, class_of }
    }
}

/// Greedy classification in `O(kn)`.
///
/// Repeatedly takes the lowest remaining vertex `v`, gathers the remaining
/// part `I` of `in[v]`, and splits `I` by `|out[u] ∩ out[v]|`; each group is
/// split once more into the members matching the group's first out-set and
/// the rest. The result equals the out-set-equality partition whenever the
/// graph is realizable on the line; otherwise it may be coarser or finer.
pub fn classify(g: &DirectedGraph) -> ClassPartition {
    classify_counted(g, &mut OpCounter::new())
}

pub fn classify_counted(g: &DirectedGraph, ops: &mut OpCounter) -> ClassPartition {
    let n = g.n();
    let k = g.k();
    let mut removed = vec![false; n];
    let mut classes = Vec::new();
    let mut group: Vec<(Vertex, usize)> = Vec::new();
    let mut buckets: Vec<Vec<Vertex>> = vec![Vec::new(); k + 2];

    for v in 0..n {
        if removed[v] {
            continue;
        }
        let out_v = g.closed_out(v);
        let closed_in = g.closed_in(v);
        ops.add(closed_in.len());
        group.clear();
        for &u in closed_in {
            if !removed[u] {
                group.push((u, intersection_size(g.closed_out(u), out_v)));
                ops.add(2 * (k + 1));
            }
        }
        if group.is_empty() {
            // v itself is always in in[v]; kept for robustness on malformed input
            removed[v] = true;
            classes.push(vec![v]);
            continue;
        }
        for &(u, overlap) in &group {
            buckets[overlap].push(u);
        }
        for bucket in buckets.iter_mut().skip(1) {
            if bucket.is_empty() {
                continue;
            }
            let rep = g.closed_out(bucket[0]);
            let (same, rest): (Vec<Vertex>, Vec<Vertex>) = bucket.iter().partition(|&&u| g.closed_out(u) == rep);
            ops.add(bucket.len() * (k + 1));
            classes.push(same);
            if !rest.is_empty() {
                classes.push(rest);
            }
            bucket.clear();
        }
        for &(u, _) in &group {
            removed[u] = true;
        }
    }
    ops.add(n);
    ClassPartition::from_classes(n, classes)
}

/// The out-set-equality partition by direct comparison, `O(k^2 n)`.
pub fn classify_naive(g: &DirectedGraph) -> ClassPartition {
    let n = g.n();
    let mut assigned = vec![false; n];
    let mut classes = Vec::new();
    for v in 0..n {
        if assigned[v] {
            continue;
        }
        // every class member lies in out[v]
        let class: Vec<Vertex> = g
            .closed_out(v)
            .iter()
            .copied()
            .filter(|&u| g.closed_out(u) == g.closed_out(v))
            .collect();
        for &u in &class {
            assigned[u] = true;
        }
        classes.push(class);
    }
    ClassPartition::from_classes(n, classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::six_chain;

    fn one_based(p: &ClassPartition) -> Vec<Vec<usize>> {
        p.classes.iter().map(|c| c.iter().map(|v| v + 1).collect()).collect()
    }

    #[test]
    fn six_chain_classes() {
        let g = six_chain();
        let expected = vec![vec![1, 2], vec![3], vec![4, 5], vec![6]];
        assert_eq!(one_based(&classify_naive(&g)), expected);
        assert_eq!(one_based(&classify(&g)), expected);
    }

    #[test]
    fn complete_digraph_single_class() {
        let g = DirectedGraph::new(3, 2, [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]).unwrap();
        assert_eq!(classify(&g).classes, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn distinct_out_sets_not_merged() {
        let g = DirectedGraph::from_one_based(4, 1, &[(1, 2), (2, 1), (3, 2), (4, 3)]).unwrap();
        let naive = classify_naive(&g);
        assert_ne!(naive.class_of[0], naive.class_of[2]);
        let fast = classify(&g);
        assert_ne!(fast.class_of[0], fast.class_of[2]);
        assert_eq!(fast, naive);
    }

    #[test]
    fn out_window_is_shared() {
        let g = six_chain();
        let p = classify(&g);
        for (c, members) in p.classes.iter().enumerate() {
            for &v in members {
                assert_eq!(g.closed_out(v), p.out_window(&g, c));
            }
        }
    }
}
