use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};

use super::supergraph::{enumerate_supergraphs, Fragment};
use crate::graph::Vertex;
use crate::lambda::{lambda_acyclic, LambdaOutcome, Pair};
use crate::line::realize_1d;
use crate::oracle::is_quasi_realization;
use crate::points::{rationalize, PointSet};

/// Coordinates found by descent are snapped to multiples of `2^-RATIONAL_BITS`
/// before the exact check.
pub const RATIONAL_BITS: u32 = 40;
/// Hinge margin as a fraction of the squared diameter.
pub const HINGE_MARGIN: f64 = 1e-3;

/// Per-component search limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Supergraphs enumerated for the pair-order precheck; fragments with
    /// more completions than this skip the precheck.
    pub supergraphs: usize,
    /// Supergraphs handed to the exact line pipeline.
    pub line_attempts: usize,
    pub restarts: usize,
    pub iterations: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            supergraphs: 10_000,
            line_attempts: 64,
            restarts: 50,
            iterations: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentStatus {
    /// The points pass the exact quasi-realization check.
    CertifiedQuasi,
    /// The points pass the check only in floating point with margin.
    HeuristicQuasi,
    /// Every k-regular supergraph has a pair-order cycle; `cycle` is the one
    /// found in the first supergraph, over the component's vertices.
    CertifiedImpossible { cycle: Vec<Pair>, supergraphs: usize },
    /// The search budget ran out.
    Unknown,
}

impl ComponentStatus {
    pub fn name(&self) -> &'static str {
        match self {
            Self::CertifiedQuasi => "certified-quasi",
            Self::HeuristicQuasi => "heuristic-quasi",
            Self::CertifiedImpossible { .. } => "certified-impossible",
            Self::Unknown => "unknown",
        }
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, Self::CertifiedQuasi | Self::HeuristicQuasi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// At most `k` vertices: any distinct points work.
    Trivial,
    /// A supergraph was realized exactly on the line.
    Line,
    /// Subgradient descent; restart and iteration where it succeeded.
    Descent {
        restart: usize,
        iteration: usize,
    },
    /// The pair-order precheck decided.
    PairOrder,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSolution {
    /// Component vertices; `points` row `i` belongs to `vertices[i]`.
    pub vertices: Vec<Vertex>,
    pub points: Option<PointSet>,
    pub status: ComponentStatus,
    pub method: SolveMethod,
}

impl ComponentSolution {
    /// Renames local vertex `i` to `vertices[i]`, in the certificate too.
    pub fn relabel(mut self, vertices: &[Vertex]) -> Self {
        assert_eq!(vertices.len(), self.vertices.len());
        if let ComponentStatus::CertifiedImpossible { cycle, .. } = &mut self.status {
            for p in cycle.iter_mut() {
                *p = Pair::new(vertices[p.0], vertices[p.1]);
            }
        }
        self.vertices = vertices.to_vec();
        self
    }
}

/// Looks for a quasi-kNN realization of `c` in `R^d`.
///
/// In order: trivial placement when `|V(c)| ≤ k`; the pair-order precheck
/// over all supergraphs when there are at most `budget.supergraphs`; the
/// exact line pipeline on the first `budget.line_attempts` supergraphs; and
/// finally multi-start descent on a hinge loss whose free out-slots are
/// filled, at every step, by the currently nearest non-neighbors.
pub fn solve_component(c: &Fragment, d: usize, budget: &Budget, rng: &mut ChaCha8Rng) -> ComponentSolution {
    assert!(d >= 1, "dimension must be positive");
    let n = c.n();
    let k = c.k();
    let edges = c.edges();
    let done = |points: PointSet, status, method| ComponentSolution {
        vertices: (0..n).collect(),
        points: Some(points),
        status,
        method,
    };

    if n <= k {
        let rows: Vec<Vec<i64>> = (0..n as i64)
            .map(|i| {
                let mut p = vec![0; d];
                p[0] = i;
                p
            })
            .collect();
        let points = PointSet::from_integers(d, &rows).expect("distinct lattice points");
        debug_assert!(is_quasi_realization(n, k, &edges, &points));
        return done(points, ComponentStatus::CertifiedQuasi, SolveMethod::Trivial);
    }

    if c.supergraph_count()
        .is_some_and(|count| count <= budget.supergraphs as u128)
    {
        let mut first_cycle = None;
        let mut count = 0;
        let mut all_cyclic = true;
        for g in enumerate_supergraphs(c) {
            count += 1;
            match lambda_acyclic(&g) {
                Ok(LambdaOutcome::NotRealizable(cycle)) => {
                    first_cycle.get_or_insert(cycle);
                }
                _ => {
                    all_cyclic = false;
                    break;
                }
            }
        }
        if all_cyclic {
            if let Some(cycle) = first_cycle {
                return ComponentSolution {
                    vertices: (0..n).collect(),
                    points: None,
                    status: ComponentStatus::CertifiedImpossible {
                        cycle,
                        supergraphs: count,
                    },
                    method: SolveMethod::PairOrder,
                };
            }
        }
    }

    for g in enumerate_supergraphs(c).take(budget.line_attempts) {
        if let Ok(r) = realize_1d(&g) {
            let rows = (0..n)
                .map(|v| {
                    let mut p = vec![Default::default(); d];
                    p[0] = r.realization.points.exact_point(v).expect("exact")[0].clone();
                    p
                })
                .collect();
            let points = PointSet::exact(d, rows).expect("distinct line points");
            if is_quasi_realization(n, k, &edges, &points) {
                return done(points, ComponentStatus::CertifiedQuasi, SolveMethod::Line);
            }
        }
    }

    let search = Descent::new(c, d);
    match search.run(budget, rng) {
        Some((points, status, method)) => done(points, status, method),
        None => ComponentSolution {
            vertices: (0..n).collect(),
            points: None,
            status: ComponentStatus::Unknown,
            method: SolveMethod::Exhausted,
        },
    }
}

/// Hinge-loss descent for the quasi-realization inequalities.
struct Descent<'a> {
    c: &'a Fragment,
    n: usize,
    d: usize,
    k: usize,
    is_edge: Vec<bool>,
}

impl<'a> Descent<'a> {
    fn new(c: &'a Fragment, d: usize) -> Self {
        let n = c.n();
        let mut is_edge = vec![false; n * n];
        for (u, v) in c.edges() {
            is_edge[u * n + v] = true;
        }
        Self {
            c,
            n,
            d,
            k: c.k(),
            is_edge,
        }
    }

    fn sq(&self, x: &[f64], a: usize, b: usize) -> f64 {
        let d = self.d;
        (0..d).map(|j| (x[a * d + j] - x[b * d + j]).powi(2)).sum()
    }

    /// Counts violated `(u, v, w)` triples and accumulates the subgradient:
    /// `v` an out-neighbor of `u`, `w` a non-neighbor beyond the
    /// `k - deg(u)` nearest ones, violated when `|uv|² + margin > |uw|²`.
    fn evaluate(&self, x: &[f64], margin: f64, mut grad: Option<&mut [f64]>) -> usize {
        let (n, d) = (self.n, self.d);
        if let Some(g) = grad.as_deref_mut() {
            g.fill(0.0);
        }
        let mut violations = 0;
        let mut outsiders: Vec<(f64, usize)> = Vec::with_capacity(n);
        for u in 0..n {
            let real = self.c.out_neighbors(u);
            if real.is_empty() {
                continue;
            }
            let free = self.k - real.len();
            outsiders.clear();
            outsiders.extend(
                (0..n)
                    .filter(|&w| w != u && !self.is_edge[u * n + w])
                    .map(|w| (self.sq(x, u, w), w)),
            );
            if outsiders.len() <= free {
                continue;
            }
            outsiders.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let constrained = &outsiders[free..];
            for &v in real {
                let reach = self.sq(x, u, v) + margin;
                for &(dw, w) in constrained.iter().take_while(|(dw, _)| *dw < reach) {
                    let _ = dw;
                    violations += 1;
                    if let Some(g) = grad.as_deref_mut() {
                        for j in 0..d {
                            let (xu, xv, xw) = (x[u * d + j], x[v * d + j], x[w * d + j]);
                            g[u * d + j] += 2.0 * (xw - xv);
                            g[v * d + j] += 2.0 * (xv - xu);
                            g[w * d + j] += 2.0 * (xu - xw);
                        }
                    }
                }
            }
        }
        violations
    }

    fn diameter_sq(&self, x: &[f64]) -> f64 {
        let mut best: f64 = 0.0;
        for a in 0..self.n {
            for b in a + 1..self.n {
                best = best.max(self.sq(x, a, b));
            }
        }
        best
    }

    /// Centers and scales to unit root-mean-square norm.
    fn normalize(&self, x: &mut [f64]) {
        let (n, d) = (self.n, self.d);
        for j in 0..d {
            let mean = (0..n).map(|i| x[i * d + j]).sum::<f64>() / n as f64;
            for i in 0..n {
                x[i * d + j] -= mean;
            }
        }
        let rms = (x.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
        if rms > 0.0 {
            for v in x.iter_mut() {
                *v /= rms;
            }
        }
    }

    fn certify(&self, x: &[f64]) -> Option<PointSet> {
        let rows = (0..self.n)
            .map(|i| {
                (0..self.d)
                    .map(|j| rationalize(x[i * self.d + j], RATIONAL_BITS))
                    .collect()
            })
            .collect();
        let points = PointSet::exact(self.d, rows).ok()?;
        is_quasi_realization(self.n, self.k, &self.c.edges(), &points).then_some(points)
    }

    fn run(&self, budget: &Budget, rng: &mut ChaCha8Rng) -> Option<(PointSet, ComponentStatus, SolveMethod)> {
        let (n, d) = (self.n, self.d);
        let mds = classical_mds(self.c, d, rng);
        let mut x = vec![0.0; n * d];
        let mut grad = vec![0.0; n * d];
        let mut last_float_pass: Option<(Vec<f64>, SolveMethod)> = None;
        for restart in 0..budget.restarts {
            match (&mds, restart % 2) {
                (Some(init), 0) => {
                    let noise = 0.02 * restart as f64;
                    for (xi, &mi) in x.iter_mut().zip(init) {
                        let z: f64 = StandardNormal.sample(rng);
                        *xi = mi + noise * z;
                    }
                }
                _ => {
                    for xi in x.iter_mut() {
                        *xi = StandardNormal.sample(rng);
                    }
                }
            }
            self.normalize(&mut x);
            for it in 0..budget.iterations {
                let margin = HINGE_MARGIN * self.diameter_sq(&x);
                let violations = self.evaluate(&x, margin, Some(&mut grad));
                if violations == 0 {
                    let method = SolveMethod::Descent { restart, iteration: it };
                    if let Some(points) = self.certify(&x) {
                        return Some((points, ComponentStatus::CertifiedQuasi, method));
                    }
                    last_float_pass = Some((x.clone(), method));
                    break;
                }
                let scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
                if scale == 0.0 {
                    break;
                }
                let progress = it as f64 / budget.iterations as f64;
                let step = 0.03 * (1.0 - progress) + 0.002;
                for (xi, gi) in x.iter_mut().zip(&grad) {
                    *xi -= step * gi / scale;
                }
                self.normalize(&mut x);
            }
            if self.evaluate(&x, 0.0, None) == 0 {
                if let Some(points) = self.certify(&x) {
                    let method = SolveMethod::Descent {
                        restart,
                        iteration: budget.iterations,
                    };
                    return Some((points, ComponentStatus::CertifiedQuasi, method));
                }
            }
        }
        let (x, method) = last_float_pass?;
        let rows = (0..n)
            .map(|i| (0..d).map(|j| rationalize(x[i * d + j], RATIONAL_BITS)).collect())
            .collect();
        let points = PointSet::exact(d, rows).ok()?;
        Some((points, ComponentStatus::HeuristicQuasi, method))
    }
}

/// Classical multidimensional scaling of undirected hop distances, by power
/// iteration on the double-centered squared-distance matrix. `None` when the
/// spectrum gives nothing usable.
fn classical_mds(c: &Fragment, d: usize, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let n = c.n();
    if n < 2 {
        return None;
    }
    let mut adj = vec![Vec::new(); n];
    for (u, v) in c.edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut hop = vec![f64::NAN; n * n];
    let mut queue = Vec::with_capacity(n);
    for s in 0..n {
        queue.clear();
        queue.push(s);
        hop[s * n + s] = 0.0;
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            for &u in &adj[v] {
                if hop[s * n + u].is_nan() {
                    hop[s * n + u] = hop[s * n + v] + 1.0;
                    queue.push(u);
                }
            }
        }
    }
    let reach = hop.iter().filter(|h| !h.is_nan()).fold(0.0f64, |m, &h| m.max(h));
    let mut b: Vec<f64> = hop
        .iter()
        .map(|&h| if h.is_nan() { reach + 1.0 } else { h })
        .map(|h| -0.5 * h * h)
        .collect();
    // double centering
    let row_mean: Vec<f64> = (0..n)
        .map(|i| b[i * n..(i + 1) * n].iter().sum::<f64>() / n as f64)
        .collect();
    let all_mean = row_mean.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] -= row_mean[i] + row_mean[j] - all_mean;
        }
    }
    let mut coords = vec![0.0; n * d];
    let mut found: Vec<Vec<f64>> = Vec::new();
    for axis in 0..d.min(n) {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut lambda = 0.0;
        for _ in 0..200 {
            for f in &found {
                let dot: f64 = f.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, fi) in v.iter_mut().zip(f) {
                    *vi -= dot * fi;
                }
            }
            let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| b[i * n + j] * v[j]).sum()).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            lambda = w.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / v.iter().map(|x| x * x).sum::<f64>();
            v = w.into_iter().map(|x| x / norm).collect();
        }
        if lambda <= 0.0 {
            if axis == 0 {
                return None;
            }
            break;
        }
        let s = lambda.sqrt();
        for i in 0..n {
            coords[i * d + axis] = v[i] * s;
        }
        found.push(v);
    }
    Some(coords)
}
