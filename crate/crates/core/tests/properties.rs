mod common;

use knn_realize::approx::{
    approx_min_balanced_cut, cut_edges, embed, enumerate_supergraphs, EmbedOptions, Fragment, UndirectedGraph,
};
use knn_realize::gen::{gen_points, random_regular_digraph, Distribution};
use knn_realize::io::{emit_graph, emit_realization, parse_graph, parse_realization, NumberMode};
use knn_realize::lambda::{lambda_acyclic, verify_pair_cycle, LambdaOutcome};
use knn_realize::line::{classify, decide_1d, realize_1d, Outcome1d};
use knn_realize::lp::{build_lp, solve_feasibility, solve_feasibility_exact, LpOutcome};
use knn_realize::oracle::{knn_graph, knn_graph_brute_force, sigma_score, verify_realization, Provenance, Realization};
use knn_realize::PointSet;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn distinct_line(values: Vec<i64>) -> PointSet {
    let mut v = values;
    v.sort_unstable();
    v.dedup();
    PointSet::from_integers(1, &v.into_iter().map(|x| vec![x]).collect::<Vec<_>>()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sliding_window_knn_matches_brute_force(values in prop::collection::vec(-1000i64..1000, 3..40), k in 1usize..5) {
        let pts = distinct_line(values);
        prop_assume!(pts.len() > k);
        prop_assert_eq!(knn_graph(&pts, k), knn_graph_brute_force(&pts, k));
    }

    #[test]
    fn line_knn_graphs_round_trip(n in 3usize..80, k in 1usize..6, seed in any::<u64>()) {
        prop_assume!(n > k);
        let g = knn_graph(&gen_points(n, 1, seed, Distribution::LineDistinctGaps), k).unwrap();
        prop_assert!(decide_1d(&g).is_realizable());
        let r = realize_1d(&g).unwrap();
        prop_assert!(verify_realization(&g, &r.realization).unwrap());
        let LpOutcome::Solution(x) = solve_feasibility(&r.system) else {
            return Err(TestCaseError::fail("feasible system reported infeasible"));
        };
        prop_assert!(common::lp_rows_hold(&r.system, &x));
    }

    #[test]
    fn classify_matches_out_set_grouping(n in 3usize..120, k in 1usize..7, seed in any::<u64>()) {
        prop_assume!(n > k);
        let g = knn_graph(&gen_points(n, 1, seed, Distribution::LineDistinctGaps), k).unwrap();
        prop_assert_eq!(classify(&g).classes, common::naive_classes(&g));
    }

    #[test]
    fn decision_agrees_with_brute_force(n in 2usize..7, k in 1usize..3, seed in any::<u64>()) {
        prop_assume!(n > k);
        let g = random_regular_digraph(n, k, seed);
        prop_assert_eq!(decide_1d(&g).is_realizable(), common::brute_force_line_order(&g).is_some());
    }

    #[test]
    fn realizable_orderings_give_windows(n in 3usize..60, k in 1usize..6, seed in any::<u64>()) {
        prop_assume!(n > k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, _, _) = common::window_graph(n, k, &mut rng);
        let d = decide_1d(&g);
        let Outcome1d::Realizable { window_start, .. } = d.outcome else {
            return Err(TestCaseError::fail("window graph rejected"));
        };
        prop_assert!(window_start.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn float_guided_and_exact_lp_agree(n in 2usize..40, k in 1usize..5, seed in any::<u64>()) {
        prop_assume!(n > k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, _, starts) = common::window_graph(n, k, &mut rng);
        let sys = build_lp(n, k, &starts).unwrap();
        for outcome in [solve_feasibility(&sys), solve_feasibility_exact(&sys)] {
            match outcome {
                LpOutcome::Solution(x) => prop_assert!(common::lp_rows_hold(&sys, &x)),
                LpOutcome::Infeasible(_) => return Err(TestCaseError::fail("feasible system reported infeasible")),
            }
        }
    }

    #[test]
    fn graph_text_round_trip(n in 2usize..50, k in 1usize..6, seed in any::<u64>()) {
        prop_assume!(n > k);
        let g = random_regular_digraph(n, k, seed);
        prop_assert_eq!(parse_graph(&emit_graph(&g)).unwrap(), g);
    }

    #[test]
    fn realization_text_round_trip(n in 1usize..30, d in 1usize..4, seed in any::<u64>(), denom in 1i64..1000) {
        let pts = gen_points(n, d, seed, Distribution::Gaussian);
        let scale = num::rational::BigRational::new(1.into(), denom.into());
        let identity: Vec<Vec<_>> = (0..d)
            .map(|i| (0..d).map(|j| num::rational::BigRational::from_integer(((i == j) as i64).into())).collect())
            .collect();
        let pts = pts.transform(&identity, &scale, &vec![Default::default(); d]);
        let r = Realization::identity(pts, Provenance::UserSupplied);
        let back = parse_realization(&emit_realization(&r), NumberMode::Exact).unwrap();
        prop_assert_eq!(back.points, r.points);
    }

    #[test]
    fn knn_graphs_have_acyclic_pair_order(n in 3usize..30, d in 1usize..4, k in 1usize..4, seed in any::<u64>()) {
        prop_assume!(n > k);
        let pts = gen_points(n, d, seed, Distribution::UniformBox);
        let Ok(g) = knn_graph(&pts, k) else { return Ok(()) };
        prop_assert!(lambda_acyclic(&g).unwrap().is_realizable());
        prop_assert_eq!(sigma_score(&g, &Realization::identity(pts, Provenance::UserSupplied)).unwrap().preserved_edges, n * k);
    }

    #[test]
    fn pair_order_cycles_verify(n in 3usize..12, k in 1usize..3, seed in any::<u64>()) {
        prop_assume!(n > k);
        let g = random_regular_digraph(n, k, seed);
        if let LambdaOutcome::NotRealizable(cycle) = lambda_acyclic(&g).unwrap() {
            prop_assert!(verify_pair_cycle(&g, &cycle));
            prop_assert!(!decide_1d(&g).is_realizable());
        }
    }

    #[test]
    fn balanced_cut_is_balanced(n in 2usize..40, extra in prop::collection::vec((0usize..40, 0usize..40), 0..80)) {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        edges.extend(extra.into_iter().filter(|&(a, b)| a < n && b < n));
        let h = UndirectedGraph::new(n, edges);
        let cut = approx_min_balanced_cut(&h);
        let rest = UndirectedGraph::new(n, h.edges().filter(|e| !cut.contains(e)).collect::<Vec<_>>());
        prop_assert!(rest.components().members.iter().all(|m| m.len() <= n.div_ceil(2)));
    }

    #[test]
    fn cut_respects_cap(n in 4usize..80, k in 1usize..4, cap in 2usize..20, seed in any::<u64>()) {
        prop_assume!(n > k);
        let g = random_regular_digraph(n, k, seed);
        let r = cut_edges(&g, 0.5, cap);
        prop_assert!(r.components.members.iter().all(|m| m.len() <= cap));
        let kept = g.edges().filter(|e| !r.removed_edges.contains(e));
        for (u, v) in kept {
            prop_assert_eq!(r.components.component_id[u], r.components.component_id[v]);
        }
        prop_assert_eq!(r.removed_fraction, num::rational::Ratio::new(r.removed_edges.len() as u64, (n * k) as u64));
    }

    #[test]
    fn supergraphs_are_regular_supersets(n in 2usize..6, k in 1usize..3, mask in any::<u64>(), seed in any::<u64>()) {
        prop_assume!(n > k);
        let g = random_regular_digraph(n, k, seed);
        let kept: Vec<_> = g.edges().enumerate().filter(|(i, _)| mask >> (i % 64) & 1 == 1).map(|(_, e)| e).collect();
        let f = Fragment::new(n, k, kept.clone()).unwrap();
        let all: Vec<_> = enumerate_supergraphs(&f).collect();
        prop_assert_eq!(all.len() as u128, f.supergraph_count().unwrap());
        let mut seen = std::collections::BTreeSet::new();
        for s in &all {
            prop_assert!(kept.iter().all(|&(u, v)| s.has_edge(u, v)));
            prop_assert!(seen.insert(s.edges().collect::<Vec<_>>()));
        }
        prop_assert!(all.contains(&g));
    }

    #[test]
    fn embedding_accounting_and_separation(n in 8usize..60, k in 1usize..4, seed in any::<u64>()) {
        let pts = gen_points(n, 2, seed, Distribution::UniformBox);
        let Ok(g) = knn_graph(&pts, k) else { return Ok(()) };
        let options = EmbedOptions { size_cap: Some(2 * k + 6), seed, ..EmbedOptions::default() };
        let r = embed(&g, 2, 0.5, &options);
        let (Some(real), Some(score), Some(cut)) = (&r.realization, r.score, &r.cut) else { return Ok(()) };
        prop_assert!(score.preserved_edges >= g.edge_count() - cut.removed_edges.len());
        let ids = &cut.components.component_id;
        let sq = |a: usize, b: usize| -> num::rational::BigRational {
            let (p, q) = (real.points.exact_point(a).unwrap(), real.points.exact_point(b).unwrap());
            p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum()
        };
        for u in 0..n {
            let size = cut.components.members[ids[u]].len();
            if size <= k {
                continue;
            }
            let mut others: Vec<usize> = (0..n).filter(|&w| w != u).collect();
            others.sort_by_cached_key(|&w| sq(u, w));
            prop_assert!(others[..k].iter().all(|&w| ids[w] == ids[u]), "vertex {} sees a foreign image", u);
        }
        for (u, v) in g.edges().filter(|e| !cut.removed_edges.contains(e)) {
            let d = sq(u, v);
            let closer = (0..n).filter(|&w| w != u && sq(u, w) <= d).count();
            prop_assert!(closer <= k, "kept edge {}->{} not preserved", u, v);
        }
    }
}
