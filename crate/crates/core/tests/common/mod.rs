//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use knn_realize::DirectedGraph;
use num::rational::BigRational;
use rand::Rng;

/// Whether some ordering puts every closed out-neighborhood on `k + 1`
/// consecutive positions with window starts non-decreasing along the
/// ordering. Backtracking over prefixes; a prefix is extended only while
/// each placed vertex's placed neighbors still form the start of a
/// contiguous block and the block starts stay monotone.
pub fn brute_force_line_order(g: &DirectedGraph) -> Option<Vec<usize>> {
    let n = g.n();
    let mut closed: Vec<Vec<bool>> = vec![vec![false; n]; n];
    for v in 0..n {
        closed[v][v] = true;
        for &u in g.out_neighbors(v) {
            closed[v][u] = true;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    if extend(g.k(), &closed, &mut order, &mut used) {
        Some(order)
    } else {
        None
    }
}

/// The block start of `v` if the placed prefix is consistent for it.
fn block_start(k: usize, closed: &[Vec<bool>], order: &[usize], p: usize) -> Option<usize> {
    let v = order[p];
    let m = order.len();
    let lo = (0..m).find(|&q| closed[v][order[q]])?;
    let end = (lo + k).min(m - 1);
    let placed = (0..m).filter(|&q| closed[v][order[q]]).count();
    let contiguous = (lo..=end).all(|q| closed[v][order[q]]);
    (contiguous && placed == end - lo + 1).then_some(lo)
}

fn extend(k: usize, closed: &[Vec<bool>], order: &mut Vec<usize>, used: &mut [bool]) -> bool {
    let m = order.len();
    if m > 0 {
        let mut prev = 0;
        for p in 0..m {
            match block_start(k, closed, order, p) {
                Some(s) if s >= prev => prev = s,
                _ => return false,
            }
        }
    }
    if m == used.len() {
        return true;
    }
    for v in 0..used.len() {
        if !used[v] {
            used[v] = true;
            order.push(v);
            if extend(k, closed, order, used) {
                return true;
            }
            order.pop();
            used[v] = false;
        }
    }
    false
}

/// Classes of equal closed out-neighborhoods, as sorted vertex lists in
/// order of their smallest member.
pub fn naive_classes(g: &DirectedGraph) -> Vec<Vec<usize>> {
    let mut by_set: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for v in 0..g.n() {
        let mut key: Vec<usize> = g.out_neighbors(v).to_vec();
        key.push(v);
        key.sort_unstable();
        by_set.entry(key).or_default().push(v);
    }
    let mut classes: Vec<Vec<usize>> = by_set.into_values().collect();
    classes.sort();
    classes
}

/// A random non-decreasing window sequence for `n` positions with
/// `s_i <= i <= s_i + k`, and the graph whose `i`-th vertex in `perm` points
/// at the rest of its window. Returns the graph, the ordering and the starts.
pub fn window_graph(n: usize, k: usize, rng: &mut impl Rng) -> (DirectedGraph, Vec<usize>, Vec<usize>) {
    assert!(n > k);
    let mut starts = Vec::with_capacity(n);
    let mut prev = 0;
    for i in 0..n {
        let lo = prev.max(i.saturating_sub(k));
        let hi = i.min(n - k - 1);
        let s = rng.random_range(lo..=hi);
        starts.push(s);
        prev = s;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| {
            let perm = &perm;
            (starts[i]..=starts[i] + k)
                .filter(move |&j| j != i)
                .map(move |j| (perm[i], perm[j]))
        })
        .collect();
    (DirectedGraph::new(n, k, edges).unwrap(), perm, starts)
}

/// Left-hand side of every LP row at `x`, computed from the row ranges.
pub fn lp_rows_hold(sys: &knn_realize::lp::LpSystem, x: &[BigRational]) -> bool {
    use num::Signed;
    x.len() == sys.vars
        && x.iter().all(|v| !v.is_negative())
        && sys.rows.iter().all(|row| {
            let plus: BigRational = row.plus.clone().map(|j| x[j].clone()).sum();
            let minus: BigRational = row.minus.clone().map(|j| x[j].clone()).sum();
            plus - minus <= BigRational::from_integer(row.bound.into())
        })
}
