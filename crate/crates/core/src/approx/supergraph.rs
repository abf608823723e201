use thiserror::Error;

use crate::graph::{DirectedGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FragmentError {
    #[error("vertex {vertex} has out-degree {degree} > k = {k}")]
    FragmentOverfull { vertex: Vertex, degree: usize, k: usize },
    #[error("edge ({0}, {1}) is a self-loop or leaves the fragment")]
    BadEdge(Vertex, Vertex),
}

/// A digraph on `0..n` with every out-degree at most `k`: what remains of a
/// component after cut edges are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    k: usize,
    out: Vec<Vec<Vertex>>,
}

impl Fragment {
    pub fn new(n: usize, k: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self, FragmentError> {
        let mut out = vec![Vec::new(); n];
        for (u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(FragmentError::BadEdge(u, v));
            }
            out[u].push(v);
        }
        for (vertex, list) in out.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.len() > k {
                return Err(FragmentError::FragmentOverfull {
                    vertex,
                    degree: list.len(),
                    k,
                });
            }
        }
        Ok(Self { k, out })
    }

    /// The subgraph of `g` on `vertices` (relabeled by position) keeping
    /// only edges for which `keep` holds.
    pub fn from_graph(g: &DirectedGraph, vertices: &[Vertex], keep: impl Fn(Vertex, Vertex) -> bool) -> Self {
        let mut local = vec![usize::MAX; g.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let edges: Vec<_> = vertices
            .iter()
            .enumerate()
            .flat_map(|(i, &v)| g.out_neighbors(v).iter().map(move |&u| (i, v, u)))
            .filter(|&(_, v, u)| local[u] != usize::MAX && keep(v, u))
            .map(|(i, _, u)| (i, local[u]))
            .collect();
        Self::new(vertices.len(), g.k(), edges).expect("subgraph of a k-regular graph")
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn out_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.out[v]
    }

    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |&v| (u, v)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn is_regular(&self) -> bool {
        self.out.iter().all(|l| l.len() == self.k)
    }

    /// `Π_v C(n - 1 - deg(v), k - deg(v))`, or `None` past `u128`.
    pub fn supergraph_count(&self) -> Option<u128> {
        let n = self.n();
        if n < self.k + 1 {
            return Some(0);
        }
        self.out.iter().try_fold(1u128, |acc, list| {
            acc.checked_mul(binomial((n - 1 - list.len()) as u128, (self.k - list.len()) as u128)?)
        })
    }
}

fn binomial(n: u128, r: u128) -> Option<u128> {
    let r = r.min(n - r);
    (0..r).try_fold(1u128, |acc, i| Some(acc.checked_mul(n - i)? / (i + 1)))
}

/// Every k-regular supergraph on the same vertex set, in a fixed order: each
/// vertex fills its free slots with a combination of its non-neighbors, and
/// the combinations advance odometer-style with the last vertex fastest.
pub fn enumerate_supergraphs(c: &Fragment) -> Supergraphs<'_> {
    let n = c.n();
    let feasible = n >= c.k + 1;
    let candidates: Vec<Vec<Vertex>> = (0..n)
        .map(|v| {
            (0..n)
                .filter(|&u| u != v && c.out[v].binary_search(&u).is_err())
                .collect()
        })
        .collect();
    let choice = (0..n)
        .map(|v| (0..c.k.saturating_sub(c.out[v].len())).collect())
        .collect();
    Supergraphs {
        fragment: c,
        candidates,
        choice,
        done: !feasible,
    }
}

pub struct Supergraphs<'a> {
    fragment: &'a Fragment,
    candidates: Vec<Vec<Vertex>>,
    /// Per vertex, increasing indices into its candidate list.
    choice: Vec<Vec<usize>>,
    done: bool,
}

impl Supergraphs<'_> {
    fn current(&self) -> DirectedGraph {
        let f = self.fragment;
        let edges = (0..f.n()).flat_map(|v| {
            f.out[v]
                .iter()
                .copied()
                .chain(self.choice[v].iter().map(move |&i| self.candidates[v][i]))
                .map(move |u| (v, u))
        });
        DirectedGraph::new(f.n(), f.k, edges.collect::<Vec<_>>()).expect("completion is k-regular")
    }
}

/// Next combination in lexicographic order; false after the last one.
fn advance(comb: &mut [usize], m: usize) -> bool {
    let r = comb.len();
    for i in (0..r).rev() {
        if comb[i] < m - r + i {
            comb[i] += 1;
            for j in i + 1..r {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

impl Iterator for Supergraphs<'_> {
    type Item = DirectedGraph;

    fn next(&mut self) -> Option<DirectedGraph> {
        if self.done {
            return None;
        }
        let g = self.current();
        self.done = true;
        for v in (0..self.choice.len()).rev() {
            let m = self.candidates[v].len();
            if advance(&mut self.choice[v], m) {
                self.done = false;
                break;
            }
            let r = self.choice[v].len();
            self.choice[v] = (0..r).collect();
        }
        Some(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::six_chain;

    #[test]
    fn regular_fragment_yields_itself() {
        let g = six_chain();
        let f = Fragment::from_graph(&g, &(0..6).collect::<Vec<_>>(), |_, _| true);
        let all: Vec<_> = enumerate_supergraphs(&f).collect();
        assert_eq!(all, vec![g]);
        assert_eq!(f.supergraph_count(), Some(1));
    }

    #[test]
    fn three_vertices_one_edge() {
        let f = Fragment::new(3, 1, [(0, 1)]).unwrap();
        let all: Vec<_> = enumerate_supergraphs(&f).collect();
        assert_eq!(all.len(), 4);
        assert_eq!(f.supergraph_count(), Some(4));
        for g in &all {
            assert!(g.has_edge(0, 1));
        }
        let mut distinct = all.clone();
        distinct.dedup();
        assert_eq!(distinct.len(), 4);
    }

    #[test]
    fn empty_fragment_of_size_k_plus_one() {
        let f = Fragment::new(3, 2, []).unwrap();
        let all: Vec<_> = enumerate_supergraphs(&f).collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].edge_count(), 6);
    }

    #[test]
    fn too_small_fragment_has_none() {
        let f = Fragment::new(2, 2, [(0, 1)]).unwrap();
        assert_eq!(enumerate_supergraphs(&f).count(), 0);
        assert_eq!(f.supergraph_count(), Some(0));
    }

    #[test]
    fn overfull() {
        assert!(matches!(
            Fragment::new(3, 1, [(0, 1), (0, 2)]),
            Err(FragmentError::FragmentOverfull {
                vertex: 0,
                degree: 2,
                k: 1
            })
        ));
    }

    #[test]
    fn count_matches_enumeration() {
        let f = Fragment::new(5, 2, [(0, 1), (2, 3), (2, 4), (4, 0)]).unwrap();
        assert_eq!(enumerate_supergraphs(&f).count() as u128, f.supergraph_count().unwrap());
    }
}
