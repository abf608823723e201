use std::cmp::Reverse;

use thiserror::Error;

use super::classify::ClassPartition;
use crate::graph::{intersection_size, DirectedGraph, Vertex};
use crate::ops::OpCounter;

/// Classes in left-to-right order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassOrdering(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassOrderError {
    /// The neighbor walk ran dry with classes left over.
    #[error("class ordering stuck after placing {placed} of {total} classes")]
    Stuck { placed: usize, total: usize },
    /// Both walks claimed the same class.
    #[error("class {0} placed twice")]
    Repeated(usize),
}

/// Collects the classes whose out-window meets `out[D]`, via the in-lists of
/// the members of `out[D]`.
struct Neighborhoods<'a> {
    g: &'a DirectedGraph,
    part: &'a ClassPartition,
    stamp: Vec<usize>,
    epoch: usize,
}

impl<'a> Neighborhoods<'a> {
    fn new(g: &'a DirectedGraph, part: &'a ClassPartition) -> Self {
        Self {
            g,
            part,
            stamp: vec![0; part.len()],
            epoch: 0,
        }
    }

    /// `(class, |out[D] ∩ out[class]|)` for every class `!= d` meeting `out[d]`
    /// and accepted by `keep`.
    fn meeting(&mut self, d: usize, keep: impl Fn(usize) -> bool, ops: &mut OpCounter) -> Vec<(usize, usize)> {
        self.epoch += 1;
        self.stamp[d] = self.epoch;
        let window = self.part.out_window(self.g, d);
        let mut found = Vec::new();
        for &w in window {
            let ins = self.g.closed_in(w);
            ops.add(ins.len());
            for &u in ins {
                let c = self.part.class_of[u];
                if self.stamp[c] != self.epoch {
                    self.stamp[c] = self.epoch;
                    if keep(c) {
                        let overlap = intersection_size(window, self.part.out_window(self.g, c));
                        ops.add(2 * window.len());
                        found.push((c, overlap));
                    }
                }
            }
        }
        found
    }
}

/// Orders the classes of a weakly-connected graph in `O(kn)`.
///
/// Starts from the lowest-id class `X`, takes its best-overlapping class `Y`
/// (lowest id on ties) to fix an orientation, splits the classes meeting
/// `out[X]` into a left and right group by whether their overlap with `out[X]`
/// stays inside `out[X] ∩ out[Y]`, then walks outward in both directions.
pub fn class_order(g: &DirectedGraph, part: &ClassPartition) -> Result<ClassOrdering, ClassOrderError> {
    class_order_counted(g, part, &mut OpCounter::new())
}

pub fn class_order_counted(
    g: &DirectedGraph,
    part: &ClassPartition,
    ops: &mut OpCounter,
) -> Result<ClassOrdering, ClassOrderError> {
    let r = part.len();
    if r <= 1 {
        return Ok(ClassOrdering((0..r).collect()));
    }
    let x = 0;
    let mut nb = Neighborhoods::new(g, part);
    let around_x = nb.meeting(x, |_| true, ops);

    #[derive(Clone, Copy, PartialEq)]
    enum Side {
        Left,
        Right,
        Far,
    }
    let mut side = vec![Side::Far; r];
    if let Some(&(y, _)) = around_x.iter().min_by_key(|&&(c, overlap)| (Reverse(overlap), c)) {
        let out_x = part.out_window(g, x);
        let xy: Vec<Vertex> = intersect(out_x, part.out_window(g, y));
        for &(c, _) in &around_x {
            let xc = intersect(out_x, part.out_window(g, c));
            ops.add(2 * out_x.len() + xc.len());
            side[c] = if is_subset(&xc, &xy) { Side::Right } else { Side::Left };
        }
    }

    let mut available: Vec<bool> = (0..r).map(|c| c != x && side[c] != Side::Right).collect();
    let left = find(&mut nb, &mut available, x, ops);
    let mut available: Vec<bool> = (0..r).map(|c| c != x && side[c] != Side::Left).collect();
    let right = find(&mut nb, &mut available, x, ops);
    ops.add(2 * r);

    let mut order = Vec::with_capacity(r);
    order.extend(left.into_iter().rev());
    order.push(x);
    order.extend(right);

    let mut placed = vec![false; r];
    for &c in &order {
        if std::mem::replace(&mut placed[c], true) {
            return Err(ClassOrderError::Repeated(c));
        }
    }
    if order.len() < r {
        return Err(ClassOrderError::Stuck {
            placed: order.len(),
            total: r,
        });
    }
    Ok(ClassOrdering(order))
}

/// Walks away from `d`: each round takes every still-available class meeting
/// `out[d]`, appends them by decreasing overlap, and moves `d` to the last.
fn find(nb: &mut Neighborhoods<'_>, available: &mut [bool], mut d: usize, ops: &mut OpCounter) -> Vec<usize> {
    let mut seq = Vec::new();
    loop {
        let mut round = nb.meeting(d, |c| available[c], ops);
        if round.is_empty() {
            return seq;
        }
        // overlaps are integers in 1..=k+1
        round.sort_unstable_by_key(|&(c, overlap)| (Reverse(overlap), c));
        ops.add(round.len());
        for &(c, _) in &round {
            available[c] = false;
            seq.push(c);
        }
        d = round.last().expect("non-empty").0;
    }
}

fn intersect(a: &[Vertex], b: &[Vertex]) -> Vec<Vertex> {
    a.iter().copied().filter(|v| b.binary_search(v).is_ok()).collect()
}

fn is_subset(small: &[Vertex], big: &[Vertex]) -> bool {
    small.iter().all(|v| big.binary_search(v).is_ok())
}
