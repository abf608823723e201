//! Brute-force ground truth: kNN graphs of point sets, the strict realization
//! check, and the edge-preservation score of an approximate realization.

use num::rational::Ratio;
use thiserror::Error;

use crate::graph::{DirectedGraph, GraphError, Vertex};
use crate::points::{Metric, PointSet, SqDist};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("need at least k + 1 = {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("point {point}: k-th and (k+1)-th nearest distances tie")]
    TieAtBoundary { point: usize },
    #[error("realization assigns {assigned} vertices, graph has {vertices}")]
    DimensionMismatch { vertices: usize, assigned: usize },
    #[error("assignment is not injective: vertices {0} and {1} share a point")]
    NotInjective(Vertex, Vertex),
    #[error("assignment refers to point {point}, but only {len} points exist")]
    PointOutOfRange { point: usize, len: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ExactLine,
    HeuristicComponent,
    UserSupplied,
}

/// An injective map from the vertices `0..n` into a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub points: PointSet,
    /// `assignment[v]` is the index of the point vertex `v` maps to.
    pub assignment: Vec<usize>,
    pub provenance: Provenance,
}

impl Realization {
    pub fn new(points: PointSet, assignment: Vec<usize>, provenance: Provenance) -> Result<Self, OracleError> {
        let mut owner = vec![usize::MAX; points.len()];
        for (v, &p) in assignment.iter().enumerate() {
            if p >= points.len() {
                return Err(OracleError::PointOutOfRange {
                    point: p,
                    len: points.len(),
                });
            }
            if owner[p] != usize::MAX {
                return Err(OracleError::NotInjective(owner[p], v));
            }
            owner[p] = v;
        }
        Ok(Self {
            points,
            assignment,
            provenance,
        })
    }

    /// Vertex `v` sits on point `v`.
    pub fn identity(points: PointSet, provenance: Provenance) -> Self {
        let assignment = (0..points.len()).collect();
        Self {
            points,
            assignment,
            provenance,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    fn check_covers(&self, n: usize) -> Result<(), OracleError> {
        if self.assignment.len() != n {
            return Err(OracleError::DimensionMismatch {
                vertices: n,
                assigned: self.assignment.len(),
            });
        }
        Ok(())
    }
}

/// Count of edges whose target is within the source's k nearest images.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApproxScore {
    pub preserved_edges: usize,
    pub total_edges: usize,
    pub fraction: Ratio<u64>,
}

impl ApproxScore {
    pub fn new(preserved_edges: usize, total_edges: usize) -> Self {
        let fraction = if total_edges == 0 {
            Ratio::from_integer(1)
        } else {
            Ratio::new(preserved_edges as u64, total_edges as u64)
        };
        Self {
            preserved_edges,
            total_edges,
            fraction,
        }
    }

    pub fn as_f64(&self) -> f64 {
        *self.fraction.numer() as f64 / *self.fraction.denom() as f64
    }
}

/// The kNN graph of `points`: an edge `a -> b` iff `b` is one of the `k`
/// points closest to `a`.
///
/// One-dimensional exact inputs take a sorted sliding-window path that runs in
/// `O(n log n + kn)`; everything else is the `O(n^2 log n)` brute force.
pub fn knn_graph(points: &PointSet, k: usize) -> Result<DirectedGraph, OracleError> {
    let n = points.len();
    if n < k + 1 {
        return Err(OracleError::TooFewPoints { needed: k + 1, got: n });
    }
    let metric = points.metric();
    if points.dim() == 1 && points.is_exact() {
        return knn_graph_line(points, &metric, k);
    }
    knn_graph_brute(&metric, n, k)
}

/// Always the brute-force construction; used as an oracle in tests.
pub fn knn_graph_brute_force(points: &PointSet, k: usize) -> Result<DirectedGraph, OracleError> {
    let n = points.len();
    if n < k + 1 {
        return Err(OracleError::TooFewPoints { needed: k + 1, got: n });
    }
    knn_graph_brute(&points.metric(), n, k)
}

fn knn_graph_brute(metric: &Metric, n: usize, k: usize) -> Result<DirectedGraph, OracleError> {
    let mut edges = Vec::with_capacity(n * k);
    let mut row: Vec<(SqDist, usize)> = Vec::with_capacity(n);
    for a in 0..n {
        row.clear();
        row.extend((0..n).filter(|&b| b != a).map(|b| (metric.sq(a, b), b)));
        row.sort_by(|x, y| metric.cmp(&x.0, &y.0).then(x.1.cmp(&y.1)));
        if k > 0 && k < row.len() && metric.tie(&row[k - 1].0, &row[k].0) {
            return Err(OracleError::TieAtBoundary { point: a });
        }
        edges.extend(row[..k].iter().map(|&(_, b)| (a, b)));
    }
    Ok(DirectedGraph::new(n, k, edges)?)
}

fn knn_graph_line(points: &PointSet, metric: &Metric, k: usize) -> Result<DirectedGraph, OracleError> {
    let n = points.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points.exact_point(a).unwrap()[0].cmp(&points.exact_point(b).unwrap()[0]));
    let mut edges = Vec::with_capacity(n * k);
    for (pos, &a) in order.iter().enumerate() {
        // window [lo, hi) around pos grows toward the nearer side
        let (mut lo, mut hi) = (pos, pos + 1);
        let mut last: Option<SqDist> = None;
        for _ in 0..k {
            let left = (lo > 0).then(|| metric.sq(a, order[lo - 1]));
            let right = (hi < n).then(|| metric.sq(a, order[hi]));
            let take_left = match (&left, &right) {
                (Some(l), Some(r)) => metric.le(l, r),
                (Some(_), None) => true,
                _ => false,
            };
            if take_left {
                lo -= 1;
                last = left;
            } else {
                hi += 1;
                last = right;
            }
        }
        if let Some(kth) = last {
            let next = [
                (lo > 0).then(|| metric.sq(a, order[lo - 1])),
                (hi < n).then(|| metric.sq(a, order[hi])),
            ];
            if next.iter().flatten().any(|d| metric.tie(d, &kth)) {
                return Err(OracleError::TieAtBoundary { point: a });
            }
        }
        edges.extend(order[lo..hi].iter().filter(|&&b| b != a).map(|&b| (a, b)));
    }
    Ok(DirectedGraph::new(n, k, edges)?)
}

/// Strict check: for every vertex, each out-neighbor is strictly closer than
/// every non-neighbor. `O(n^2)` distance evaluations.
pub fn verify_realization(g: &DirectedGraph, r: &Realization) -> Result<bool, OracleError> {
    r.check_covers(g.n())?;
    let metric = r.points.metric();
    let phi = &r.assignment;
    let mut is_out = vec![false; g.n()];
    for v in 0..g.n() {
        let outs = g.out_neighbors(v);
        for &u in outs {
            is_out[u] = true;
        }
        let mut farthest_in: Option<SqDist> = None;
        for &u in outs {
            let d = metric.sq(phi[v], phi[u]);
            if farthest_in.as_ref().is_none_or(|f| metric.cmp(&d, f).is_gt()) {
                farthest_in = Some(d);
            }
        }
        let mut ok = true;
        if let Some(threshold) = farthest_in {
            for u in 0..g.n() {
                if u == v || is_out[u] {
                    continue;
                }
                if !metric.lt(&threshold, &metric.sq(phi[v], phi[u])) {
                    ok = false;
                    break;
                }
            }
        }
        for &u in outs {
            is_out[u] = false;
        }
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Edge-preservation score: an edge `(u, v)` counts when at most `k` other
/// images lie within distance `|phi(u) - phi(v)|` of `phi(u)` (ties counted).
pub fn sigma_score(g: &DirectedGraph, r: &Realization) -> Result<ApproxScore, OracleError> {
    r.check_covers(g.n())?;
    let metric = r.points.metric();
    let preserved = preserved_edges(&metric, &r.assignment, g.n(), g.k(), g.edges());
    Ok(ApproxScore::new(preserved, g.edge_count()))
}

pub(crate) fn preserved_edges<I>(metric: &Metric, phi: &[usize], n: usize, k: usize, edges: I) -> usize
where
    I: IntoIterator<Item = (Vertex, Vertex)>,
{
    let mut count = 0;
    let mut cached: Option<(Vertex, Vec<SqDist>)> = None;
    for (u, v) in edges {
        if cached.as_ref().is_none_or(|(c, _)| *c != u) {
            let row = (0..n).map(|w| metric.sq(phi[u], phi[w])).collect();
            cached = Some((u, row));
        }
        let row = &cached.as_ref().unwrap().1;
        let reach = &row[v];
        let within = (0..n).filter(|&w| w != u && metric.le(&row[w], reach)).count();
        if within <= k {
            count += 1;
        }
    }
    count
}

/// Quasi-kNN check for a possibly non-regular fragment on vertices `0..n`:
/// every listed edge `(u, v)` must have at most `k` other images within
/// distance `|phi(u) - phi(v)|` of `phi(u)`.
pub fn is_quasi_realization(n: usize, k: usize, edges: &[(Vertex, Vertex)], points: &PointSet) -> bool {
    assert_eq!(points.len(), n, "one point per fragment vertex");
    let phi: Vec<usize> = (0..n).collect();
    let metric = points.metric();
    preserved_edges(&metric, &phi, n, k, edges.iter().copied()) == edges.len()
}
