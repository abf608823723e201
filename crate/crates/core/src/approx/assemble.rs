use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

use super::cut::CutResult;
use super::solver::{ComponentSolution, ComponentStatus};
use crate::graph::{DirectedGraph, Vertex};
use crate::lambda::Pair;
use crate::oracle::{sigma_score, ApproxScore, OracleError, Provenance, Realization};
use crate::points::{PointError, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssemblyError {
    #[error("component {component} has no solution")]
    UnsolvedComponent { component: usize },
    #[error("component {component} has no quasi-realization in any dimension")]
    ImpossibleComponent { component: usize, cycle: Vec<Pair> },
    #[error("solution {index} does not match component {index} of the cut")]
    Mismatch { index: usize },
    #[error("assembled score {preserved}/{total} is below the accounting bound")]
    AccountingViolated { preserved: usize, total: usize },
    #[error("vertex {vertex} has a nearer image outside its component")]
    TranslationUnsound { vertex: Vertex },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Points(#[from] PointError),
}

/// Solved components translated apart into one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    pub realization: Realization,
    pub score: ApproxScore,
    /// Distance between consecutive component origins along the first axis.
    pub translation: BigInt,
}

fn sq_dist(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .fold(BigRational::zero(), |s, t| s + t)
}

/// `⌈√x⌉` for non-negative `x`, at least 1.
fn ceil_sqrt(x: &BigRational) -> BigInt {
    let c = x.ceil().to_integer();
    let mut s = c.sqrt();
    if &s * &s < c {
        s += 1;
    }
    s.max(BigInt::one())
}

/// Places component `i` at `i * t` along the first axis, with
/// `t = 3 * D * (r + 1)`, `D` the ceiling of the largest local diameter and
/// `r` the number of components. Each local solution is first shifted so its
/// first vertex sits at the origin.
///
/// `solutions[i]` must describe `cut.components.members[i]`. Checks that
/// the score meets `1 - removed_fraction` and that every vertex in a
/// component of more than `k` vertices has its `k` nearest images inside it.
pub fn assemble_embedding(
    solutions: &[ComponentSolution],
    d: usize,
    g: &DirectedGraph,
    cut: &CutResult,
) -> Result<Assembly, AssemblyError> {
    let members = &cut.components.members;
    if solutions.len() != members.len() {
        return Err(AssemblyError::Mismatch {
            index: solutions.len().min(members.len()),
        });
    }
    let mut local: Vec<Vec<Vec<BigRational>>> = Vec::with_capacity(solutions.len());
    let mut max_sq = BigRational::zero();
    for (i, s) in solutions.iter().enumerate() {
        match &s.status {
            ComponentStatus::CertifiedImpossible { cycle, .. } => {
                return Err(AssemblyError::ImpossibleComponent {
                    component: i,
                    cycle: cycle.clone(),
                })
            }
            ComponentStatus::Unknown => return Err(AssemblyError::UnsolvedComponent { component: i }),
            _ => {}
        }
        let points = s
            .points
            .as_ref()
            .ok_or(AssemblyError::UnsolvedComponent { component: i })?;
        if s.vertices != members[i] || points.len() != s.vertices.len() || points.dim() != d {
            return Err(AssemblyError::Mismatch { index: i });
        }
        let rows: Vec<Vec<BigRational>> = (0..points.len())
            .map(|j| match points.exact_point(j) {
                Some(p) => p.to_vec(),
                None => points
                    .point_f64(j)
                    .iter()
                    .map(|&x| BigRational::from_float(x).unwrap_or_default())
                    .collect(),
            })
            .collect();
        let origin = rows[0].clone();
        let rows: Vec<Vec<BigRational>> = rows
            .into_iter()
            .map(|p| p.iter().zip(&origin).map(|(x, o)| x - o).collect())
            .collect();
        for a in 0..rows.len() {
            for b in a + 1..rows.len() {
                let dist = sq_dist(&rows[a], &rows[b]);
                if dist > max_sq {
                    max_sq = dist;
                }
            }
        }
        local.push(rows);
    }

    let diameter = ceil_sqrt(&max_sq);
    let translation: BigInt = BigInt::from(3) * &diameter * BigInt::from(members.len() + 1);
    let mut global = vec![Vec::new(); g.n()];
    for (i, rows) in local.into_iter().enumerate() {
        let shift = BigRational::from_integer(&translation * BigInt::from(i));
        for (&v, mut p) in members[i].iter().zip(rows) {
            p[0] += &shift;
            global[v] = p;
        }
    }
    let points = PointSet::exact(d, global)?;
    let realization = Realization::identity(points, Provenance::HeuristicComponent);
    let score = sigma_score(g, &realization)?;

    let kept = score.total_edges - cut.removed_edges.len();
    if score.preserved_edges < kept {
        return Err(AssemblyError::AccountingViolated {
            preserved: score.preserved_edges,
            total: score.total_edges,
        });
    }
    check_translation(&realization.points, members, g.k(), &max_sq)?;
    Ok(Assembly {
        realization,
        score,
        translation,
    })
}

/// Components occupy disjoint slabs along the first axis; consecutive slabs
/// must be further apart than any local diameter, so no foreign point is
/// nearer than any point of a vertex's own component.
fn check_translation(
    points: &PointSet,
    members: &[Vec<Vertex>],
    k: usize,
    max_sq: &BigRational,
) -> Result<(), AssemblyError> {
    let mut slabs: Vec<(BigRational, BigRational, usize)> = members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let xs = m.iter().map(|&v| points.exact_point(v).expect("exact")[0].clone());
            let lo = xs.clone().min().expect("non-empty component");
            let hi = xs.max().expect("non-empty component");
            (lo, hi, i)
        })
        .collect();
    slabs.sort();
    for w in slabs.windows(2) {
        let gap = &w[1].0 - &w[0].1;
        let big = members[w[0].2].len() > k || members[w[1].2].len() > k;
        if big && (!gap.is_positive() || &(&gap * &gap) <= max_sq) {
            let vertex = members[w[0].2][0];
            return Err(AssemblyError::TranslationUnsound { vertex });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::cut::cut_edges;
    use crate::approx::solver::SolveMethod;
    use crate::graph::tests::six_chain;
    use crate::graph::ComponentLabeling;
    use num::rational::Ratio;

    fn solution(vertices: Vec<Vertex>, rows: &[Vec<i64>]) -> ComponentSolution {
        ComponentSolution {
            points: Some(PointSet::from_integers(rows[0].len(), rows).unwrap()),
            vertices,
            status: ComponentStatus::CertifiedQuasi,
            method: SolveMethod::Trivial,
        }
    }

    fn two_triples() -> DirectedGraph {
        DirectedGraph::new(
            6,
            2,
            [
                (0, 1),
                (0, 2),
                (1, 0),
                (1, 2),
                (2, 0),
                (2, 1),
                (3, 4),
                (3, 5),
                (4, 3),
                (4, 5),
                (5, 3),
                (5, 4),
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_component_is_a_shift() {
        let g = six_chain();
        let cut = cut_edges(&g, 0.5, 6);
        let s = solution(cut.components.members[0].clone(), &{
            let pos = [0, 25, 50, 65, 80, 120];
            cut.components.members[0]
                .iter()
                .map(|&v| vec![pos[v]])
                .collect::<Vec<_>>()
        });
        let a = assemble_embedding(&[s], 1, &g, &cut).unwrap();
        assert_eq!(a.score.preserved_edges, 12);
        assert_eq!(a.translation, BigInt::from(3 * 120 * 2));
    }

    #[test]
    fn two_triples_far_apart() {
        let g = two_triples();
        let cut = cut_edges(&g, 0.1, 3);
        let tri = [vec![0, 0], vec![1, 0], vec![0, 1]];
        let sols: Vec<_> = cut
            .components
            .members
            .iter()
            .map(|m| solution(m.clone(), &tri))
            .collect();
        let a = assemble_embedding(&sols, 2, &g, &cut).unwrap();
        assert_eq!(a.score.fraction, Ratio::from_integer(1));
        // local diameter sqrt 2 rounds up to 2; two components
        assert_eq!(a.translation, BigInt::from(18));
        let p = &a.realization.points;
        let mut intra = BigRational::zero();
        let mut inter: Option<BigRational> = None;
        for u in 0..6 {
            for v in u + 1..6 {
                let dist = sq_dist(p.exact_point(u).unwrap(), p.exact_point(v).unwrap());
                if (u < 3) == (v < 3) {
                    intra = intra.max(dist);
                } else {
                    inter = Some(inter.map_or(dist.clone(), |m: BigRational| m.min(dist)));
                }
            }
        }
        assert!(inter.unwrap() >= BigRational::from_integer(4.into()) * intra);
    }

    #[test]
    fn six_chain_split_in_halves() {
        let g = six_chain();
        let removed: Vec<_> = g.edges().filter(|&(u, v)| (u < 3) != (v < 3)).collect();
        // (3,4), (4,3) and (5,3) in 1-based ids
        assert_eq!(removed.len(), 3);
        let kept = g.edges().filter(|e| !removed.contains(e));
        let cut = CutResult {
            removed_fraction: Ratio::new(3, 12),
            components: ComponentLabeling::from_edges(6, kept),
            removed_edges: removed,
            threshold_exceeded: false,
            size_cap: 3,
        };
        let sols: Vec<_> = cut
            .components
            .members
            .iter()
            .map(|m| solution(m.clone(), &m.iter().map(|&v| vec![v as i64]).collect::<Vec<_>>()))
            .collect();
        let a = assemble_embedding(&sols, 1, &g, &cut).unwrap();
        assert!(a.score.fraction >= Ratio::new(9, 12));
    }

    #[test]
    fn unsolved_and_impossible() {
        let g = two_triples();
        let cut = cut_edges(&g, 0.1, 3);
        let tri = [vec![0], vec![1], vec![3]];
        let mut sols: Vec<_> = cut
            .components
            .members
            .iter()
            .map(|m| solution(m.clone(), &tri))
            .collect();
        sols[1].status = ComponentStatus::Unknown;
        assert_eq!(
            assemble_embedding(&sols, 1, &g, &cut).unwrap_err(),
            AssemblyError::UnsolvedComponent { component: 1 }
        );
        sols[0].status = ComponentStatus::CertifiedImpossible {
            cycle: vec![Pair::new(0, 1)],
            supergraphs: 1,
        };
        assert!(matches!(
            assemble_embedding(&sols, 1, &g, &cut),
            Err(AssemblyError::ImpossibleComponent { component: 0, .. })
        ));
    }

    #[test]
    fn ceil_sqrt_values() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(ceil_sqrt(&r(0, 1)), BigInt::from(1));
        assert_eq!(ceil_sqrt(&r(4, 1)), BigInt::from(2));
        assert_eq!(ceil_sqrt(&r(17, 4)), BigInt::from(3));
        assert_eq!(ceil_sqrt(&r(1, 9)), BigInt::from(1));
    }
}
