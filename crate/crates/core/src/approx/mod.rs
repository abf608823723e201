//! Approximate realization in `R^d`: cut the graph into small weak
//! components, find a quasi-realization of each, and translate the pieces
//! apart along the first axis.

mod assemble;
mod cut;
mod solver;
mod supergraph;

pub use assemble::{assemble_embedding, Assembly, AssemblyError};
pub use cut::{approx_min_balanced_cut, cut_edges, default_size_cap, CutResult, UndirectedGraph, CUT_SEEDS};
pub use solver::{
    solve_component, Budget, ComponentSolution, ComponentStatus, SolveMethod, HINGE_MARGIN, RATIONAL_BITS,
};
pub use supergraph::{enumerate_supergraphs, Fragment, FragmentError, Supergraphs};

use num::bigint::BigInt;
use rayon::prelude::*;

use crate::gen::substream;
use crate::graph::DirectedGraph;
use crate::lambda::{lambda_acyclic, LambdaOutcome, Pair, DEFAULT_MAX_VERTICES};
use crate::oracle::{ApproxScore, Realization};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedOptions {
    /// Fixed component size cap. When `None` the default cap is used and
    /// doubled while the cut removes more than `eps` of the edges.
    pub size_cap: Option<usize>,
    pub budget: Budget,
    pub seed: u64,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        Self {
            size_cap: None,
            budget: Budget::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Impossibility {
    /// A cycle in the pair-order graph of `G` itself.
    Global { cycle: Vec<Pair> },
    /// Every k-regular completion of a component's kept edges has a
    /// pair-order cycle; `cycle` is the one of the first completion.
    Component {
        component: usize,
        cycle: Vec<Pair>,
        supergraphs: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbedStatus {
    /// Every component solved and the cut stayed within `eps`.
    Success,
    /// Every component solved but the cut removed more than `eps`.
    ThresholdExceeded,
    /// `G` has no kNN realization in any dimension.
    CertifiedImpossible(Impossibility),
    /// Some component could not be solved within budget. This says nothing
    /// about realizability.
    Unknown,
}

impl EmbedStatus {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Success => "success",
            Self::ThresholdExceeded => "threshold-exceeded",
            Self::CertifiedImpossible(_) => "certified-impossible",
            Self::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingResult {
    pub status: EmbedStatus,
    /// Present whenever every component was solved.
    pub realization: Option<Realization>,
    pub score: Option<ApproxScore>,
    pub translation: Option<BigInt>,
    /// Absent when the global pair-order check decided before cutting.
    pub cut: Option<CutResult>,
    pub components: Vec<ComponentSolution>,
}

/// Finds a placement of `g` in `R^d` preserving at least a `1 - eps`
/// fraction of the edges, or certifies that `g` is not a kNN graph.
///
/// Graphs with at most 2000 vertices are first checked for a pair-order
/// cycle. Component solves run in parallel; each draws from its own random
/// stream keyed by the seed and component index, so results do not depend
/// on scheduling.
pub fn embed(g: &DirectedGraph, d: usize, eps: f64, options: &EmbedOptions) -> EmbeddingResult {
    assert!(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
    assert!(d >= 1, "dimension must be positive");
    if g.n() <= DEFAULT_MAX_VERTICES {
        if let Ok(LambdaOutcome::NotRealizable(cycle)) = lambda_acyclic(g) {
            return EmbeddingResult {
                status: EmbedStatus::CertifiedImpossible(Impossibility::Global { cycle }),
                realization: None,
                score: None,
                translation: None,
                cut: None,
                components: Vec::new(),
            };
        }
    }

    let cut = match options.size_cap {
        Some(cap) => cut_edges(g, eps, cap),
        None => {
            let mut cap = default_size_cap(g.k(), eps);
            loop {
                let cut = cut_edges(g, eps, cap);
                if !cut.threshold_exceeded || cap >= g.n() {
                    break cut;
                }
                cap = cap.saturating_mul(2).min(g.n());
            }
        }
    };

    let kept = |u, v| cut.removed_edges.binary_search(&(u, v)).is_err();
    let components: Vec<ComponentSolution> = cut
        .components
        .members
        .par_iter()
        .enumerate()
        .map(|(i, members)| {
            let fragment = Fragment::from_graph(g, members, kept);
            let mut rng = substream(options.seed, &format!("component-{i}"));
            solve_component(&fragment, d, &options.budget, &mut rng).relabel(members)
        })
        .collect();

    let impossible = components.iter().enumerate().find_map(|(i, s)| match &s.status {
        ComponentStatus::CertifiedImpossible { cycle, supergraphs } => Some(Impossibility::Component {
            component: i,
            cycle: cycle.clone(),
            supergraphs: *supergraphs,
        }),
        _ => None,
    });
    let mut result = EmbeddingResult {
        status: EmbedStatus::Unknown,
        realization: None,
        score: None,
        translation: None,
        cut: None,
        components,
    };
    if let Some(why) = impossible {
        result.status = EmbedStatus::CertifiedImpossible(why);
    } else if result.components.iter().all(|s| s.status.is_solved()) {
        if let Ok(a) = assemble_embedding(&result.components, d, g, &cut) {
            result.status = if cut.threshold_exceeded {
                EmbedStatus::ThresholdExceeded
            } else {
                EmbedStatus::Success
            };
            result.realization = Some(a.realization);
            result.score = Some(a.score);
            result.translation = Some(a.translation);
        }
    }
    result.cut = Some(cut);
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_points, Distribution};
    use crate::lambda::verify_pair_cycle;
    use crate::oracle::{knn_graph, verify_realization};
    use num::rational::Ratio;

    #[test]
    fn three_cycle_is_impossible() {
        let g = DirectedGraph::new(3, 1, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let r = embed(&g, 2, 0.5, &EmbedOptions::default());
        let EmbedStatus::CertifiedImpossible(Impossibility::Global { cycle }) = &r.status else {
            panic!("{:?}", r.status);
        };
        assert!(verify_pair_cycle(&g, cycle));
    }

    #[test]
    fn line_graph_round_trip() {
        let pts = gen_points(20, 1, 4, Distribution::LineDistinctGaps);
        let g = knn_graph(&pts, 2).unwrap();
        let options = EmbedOptions {
            size_cap: Some(20),
            ..EmbedOptions::default()
        };
        let r = embed(&g, 1, 0.1, &options);
        assert_eq!(r.status, EmbedStatus::Success);
        assert_eq!(r.score.unwrap().fraction, Ratio::from_integer(1));
        assert!(verify_realization(&g, r.realization.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn plane_points() {
        let pts = gen_points(100, 2, 7, Distribution::UniformBox);
        let g = knn_graph(&pts, 3).unwrap();
        let r = embed(&g, 2, 0.15, &EmbedOptions::default());
        assert_eq!(
            r.status,
            EmbedStatus::Success,
            "{:?}",
            r.components.iter().map(|c| c.status.name()).collect::<Vec<_>>()
        );
        let cut = r.cut.as_ref().unwrap();
        let score = r.score.unwrap();
        assert!(score.fraction >= Ratio::from_integer(1) - cut.removed_fraction);
        assert!(score.as_f64() >= 0.85);
    }

    #[test]
    fn deterministic() {
        let pts = gen_points(60, 2, 9, Distribution::Gaussian);
        let g = knn_graph(&pts, 2).unwrap();
        let a = embed(&g, 2, 0.2, &EmbedOptions::default());
        let b = embed(&g, 2, 0.2, &EmbedOptions::default());
        assert_eq!(a, b);
    }
}
