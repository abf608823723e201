//! Exact recognition and realization of kNN graphs of points on the line.
//!
//! [`decide_1d`] runs classify, class ordering, vertex ordering and the
//! window check per weak component in `O(kn)` total. [`realize_1d`] feeds the
//! resulting windows to the gap LP and returns exact rational coordinates.

mod class_order;
mod classify;
mod condition;
mod vertex_order;

pub use class_order::{class_order, class_order_counted, ClassOrderError, ClassOrdering};
pub use classify::{classify, classify_counted, classify_naive, ClassPartition};
pub use condition::{check_condition1, check_condition1_counted, Condition1};
pub use vertex_order::{vertex_order, vertex_order_counted, InWindowSignature, NotAPermutation, VertexOrdering};

use num::rational::BigRational;
use thiserror::Error;

use crate::graph::{DirectedGraph, Vertex};
use crate::lp::{build_lp, extract_coordinates, solve_feasibility, LineRealization, LpOutcome, LpSystem};
use crate::ops::OpCounter;
use crate::oracle::{verify_realization, Provenance, Realization};
use crate::points::PointSet;

/// Intermediate results for one weak component, in local ids `0..len`
/// except where noted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentTrace {
    /// Global ids, ascending; local id `i` is `vertices[i]`.
    pub vertices: Vec<Vertex>,
    pub partition: ClassPartition,
    pub class_order: Result<ClassOrdering, ClassOrderError>,
    /// Global ids.
    pub vertex_order: Option<Vec<Vertex>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// The class ordering of this component failed.
    ClassOrder { component: usize, error: ClassOrderError },
    /// This vertex's window broke in the produced ordering.
    Window { vertex: Vertex },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome1d {
    Realizable {
        ordering: VertexOrdering,
        /// 0-based, indexed by ordering position.
        window_start: Vec<usize>,
    },
    NotRealizable(Witness),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision1d {
    pub outcome: Outcome1d,
    pub components: Vec<ComponentTrace>,
    /// Elementary operations performed, for scaling measurements.
    pub ops: u64,
}

impl Decision1d {
    pub fn is_realizable(&self) -> bool {
        matches!(self.outcome, Outcome1d::Realizable { .. })
    }
}

/// Decides whether `g` is the kNN graph of some points on the line.
pub fn decide_1d(g: &DirectedGraph) -> Decision1d {
    let mut ops = OpCounter::new();
    let labels = g.weak_components();
    ops.add(2 * g.edge_count() + g.n());
    let mut components = Vec::with_capacity(labels.component_count());
    let mut order = Vec::with_capacity(g.n());
    let mut failure = None;
    for (id, mut vertices) in labels.members.into_iter().enumerate() {
        vertices.sort_unstable();
        let sub = g
            .induced(&vertices)
            .expect("weak components are closed under out-edges");
        ops.add(vertices.len() * (g.k() + 1));
        let partition = classify_counted(&sub, &mut ops);
        let classes = class_order_counted(&sub, &partition, &mut ops);
        let vertex_order = match &classes {
            Ok(c) => {
                let (local, _) = vertex_order_counted(&sub, &partition, c, &mut ops);
                let global: Vec<Vertex> = local.as_slice().iter().map(|&i| vertices[i]).collect();
                order.extend_from_slice(&global);
                Some(global)
            }
            Err(error) => {
                failure.get_or_insert(Witness::ClassOrder {
                    component: id,
                    error: error.clone(),
                });
                None
            }
        };
        components.push(ComponentTrace {
            vertices,
            partition,
            class_order: classes,
            vertex_order,
        });
    }
    let outcome = match failure {
        Some(w) => Outcome1d::NotRealizable(w),
        None => {
            let ordering = VertexOrdering::new(order, g.n()).expect("components partition the vertices");
            match check_condition1_counted(g, &ordering, &mut ops) {
                Condition1::Feasible { window_start } => Outcome1d::Realizable { ordering, window_start },
                Condition1::Infeasible { witness } => Outcome1d::NotRealizable(Witness::Window { vertex: witness }),
            }
        }
    };
    Decision1d {
        outcome,
        components,
        ops: ops.get(),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RealizeError {
    #[error("not realizable on the line: {0:?}")]
    NotRealizable(Witness),
    /// Cannot happen for a correct pipeline; carries the system and the
    /// Farkas certificate for diagnosis.
    #[error("gap LP infeasible for a window-feasible ordering")]
    LpInfeasible {
        system: LpSystem,
        certificate: Vec<BigRational>,
    },
    #[error("extracted coordinates do not realize the graph")]
    PostVerifyFailed(LineRealization),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Realization1d {
    pub line: LineRealization,
    pub system: LpSystem,
    /// One 1-D point per vertex, indexed by vertex id.
    pub realization: Realization,
}

/// Realizes `g` on the line with exact rational coordinates, verified
/// against the brute-force oracle before returning.
pub fn realize_1d(g: &DirectedGraph) -> Result<Realization1d, RealizeError> {
    let (ordering, window_start) = match decide_1d(g).outcome {
        Outcome1d::Realizable { ordering, window_start } => (ordering, window_start),
        Outcome1d::NotRealizable(w) => return Err(RealizeError::NotRealizable(w)),
    };
    let system = build_lp(g.n(), g.k(), &window_start).expect("windows come from the condition check");
    let delta = match solve_feasibility(&system) {
        LpOutcome::Solution(delta) => delta,
        LpOutcome::Infeasible(certificate) => return Err(RealizeError::LpInfeasible { system, certificate }),
    };
    let line = extract_coordinates(&delta, ordering);
    let mut coords = vec![BigRational::default(); g.n()];
    for (x, &v) in line.coordinates.iter().zip(line.ordering.as_slice()) {
        coords[v] = x.clone();
    }
    let points =
        PointSet::exact(1, coords.into_iter().map(|x| vec![x]).collect()).expect("strictly increasing coordinates");
    let realization = Realization::identity(points, Provenance::ExactLine);
    if !verify_realization(g, &realization).unwrap_or(false) {
        return Err(RealizeError::PostVerifyFailed(line));
    }
    Ok(Realization1d {
        line,
        system,
        realization,
    })
}
