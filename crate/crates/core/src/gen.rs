//! Seeded instance generators.
//!
//! All randomness derives from a single `u64` seed through named ChaCha
//! substreams, so independent consumers of one seed never share draws.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};

use crate::graph::DirectedGraph;
use crate::points::PointSet;

/// Side of the integer box for `uniform-box`.
pub const BOX_SIDE: i64 = 1 << 24;
/// Integer units per standard deviation for `gaussian`.
pub const GAUSSIAN_SCALE: f64 = (1u64 << 20) as f64;
/// Gaps of `line-distinct-gaps` are drawn from `1..=MAX_GAP`.
pub const MAX_GAP: i64 = 1 << 30;
/// Above this many points, tie rejection only inspects each point's nearest
/// [`TIE_CHECK_DEPTH`] neighbors instead of all of them.
pub const FULL_TIE_CHECK_LIMIT: usize = 4096;
pub const TIE_CHECK_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// Integer coordinates uniform in `[0, BOX_SIDE)`.
    UniformBox,
    /// Rounded normal coordinates with standard deviation `GAUSSIAN_SCALE`.
    Gaussian,
    /// Points on the first axis with pairwise-distinct consecutive gaps and
    /// no two equal distances from any point (other axes zero).
    LineDistinctGaps,
}

impl FromStr for Distribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform-box" => Ok(Self::UniformBox),
            "gaussian" => Ok(Self::Gaussian),
            "line-distinct-gaps" => Ok(Self::LineDistinctGaps),
            other => Err(format!(
                "unknown distribution `{other}` (expected uniform-box, gaussian or line-distinct-gaps)"
            )),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::UniformBox => "uniform-box",
            Self::Gaussian => "gaussian",
            Self::LineDistinctGaps => "line-distinct-gaps",
        })
    }
}

/// Deterministic generator for the named substream of `seed`.
pub fn substream(seed: u64, name: &str) -> ChaCha8Rng {
    // FNV-1a, stable across platforms and releases
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(h);
    rng
}

/// `n` exact integer points in `R^d`.
pub fn gen_points(n: usize, d: usize, seed: u64, dist: Distribution) -> PointSet {
    assert!(d >= 1, "dimension must be positive");
    let mut rng = substream(seed, "points");
    let rows: Vec<Vec<i64>> = match dist {
        Distribution::UniformBox => (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(0..BOX_SIDE)).collect())
            .collect(),
        Distribution::Gaussian => (0..n)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        (z * GAUSSIAN_SCALE).round() as i64
                    })
                    .collect()
            })
            .collect(),
        Distribution::LineDistinctGaps => line_distinct_gaps(n, &mut rng)
            .into_iter()
            .map(|x| {
                let mut p = vec![0; d];
                p[0] = x;
                p
            })
            .collect(),
    };
    PointSet::from_integers(d, &rows).expect("generated points are distinct")
}

fn line_distinct_gaps(n: usize, rng: &mut ChaCha8Rng) -> Vec<i64> {
    loop {
        let mut seen = HashSet::with_capacity(n);
        let mut xs = Vec::with_capacity(n);
        let mut x = 0i64;
        for i in 0..n {
            if i > 0 {
                let gap = loop {
                    let g = rng.random_range(1..=MAX_GAP);
                    if seen.insert(g) {
                        break g;
                    }
                };
                x += gap;
            }
            xs.push(x);
        }
        if !has_distance_tie(&xs) {
            return xs;
        }
    }
}

/// Whether some point sees two others at the same distance. Walks outward
/// from each point merging the left and right distance sequences.
fn has_distance_tie(xs: &[i64]) -> bool {
    let n = xs.len();
    let depth = if n <= FULL_TIE_CHECK_LIMIT { n } else { TIE_CHECK_DEPTH };
    for i in 0..n {
        let (mut l, mut r) = (i, i + 1);
        for _ in 0..depth {
            match (l > 0, r < n) {
                (true, true) => {
                    let dl = xs[i] - xs[l - 1];
                    let dr = xs[r] - xs[i];
                    if dl == dr {
                        return true;
                    }
                    if dl < dr {
                        l -= 1;
                    } else {
                        r += 1;
                    }
                }
                _ => break,
            }
        }
    }
    false
}

/// Uniformly random k-regular digraph: each vertex picks `k` distinct
/// out-neighbors among the others.
pub fn random_regular_digraph(n: usize, k: usize, seed: u64) -> DirectedGraph {
    assert!(k < n.max(1), "need k < n");
    let mut rng = substream(seed, "digraph");
    let mut edges = Vec::with_capacity(n * k);
    for v in 0..n {
        for i in sample(&mut rng, n - 1, k) {
            let u = if i >= v { i + 1 } else { i };
            edges.push((v, u));
        }
    }
    DirectedGraph::new(n, k, edges).expect("k distinct targets per vertex")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{knn_graph, OracleError};

    #[test]
    fn deterministic() {
        for dist in [
            Distribution::UniformBox,
            Distribution::Gaussian,
            Distribution::LineDistinctGaps,
        ] {
            assert_eq!(gen_points(5, 1, 7, dist), gen_points(5, 1, 7, dist));
        }
        assert_ne!(
            gen_points(5, 2, 7, Distribution::UniformBox),
            gen_points(5, 2, 8, Distribution::UniformBox)
        );
    }

    #[test]
    fn empty() {
        assert!(gen_points(0, 2, 1, Distribution::Gaussian).is_empty());
        assert!(gen_points(0, 1, 1, Distribution::LineDistinctGaps).is_empty());
    }

    #[test]
    fn three_line_points_never_tie() {
        for seed in 0..10_000 {
            let p = gen_points(3, 1, seed, Distribution::LineDistinctGaps);
            for k in 1..=2 {
                assert!(!matches!(knn_graph(&p, k), Err(OracleError::TieAtBoundary { .. })));
            }
        }
    }

    #[test]
    fn tie_detection() {
        assert!(has_distance_tie(&[0, 1, 2]));
        assert!(has_distance_tie(&[0, 3, 5, 6]));
        assert!(!has_distance_tie(&[0, 1, 3, 7]));
    }

    #[test]
    fn regular_digraph() {
        let g = random_regular_digraph(10, 3, 5);
        assert_eq!(g.edge_count(), 30);
        assert_eq!(g, random_regular_digraph(10, 3, 5));
    }

    #[test]
    fn parse_names() {
        for dist in [
            Distribution::UniformBox,
            Distribution::Gaussian,
            Distribution::LineDistinctGaps,
        ] {
            assert_eq!(dist.to_string().parse::<Distribution>(), Ok(dist));
        }
        assert!("cube".parse::<Distribution>().is_err());
    }
}
