//! Recognition and realization of Euclidean k-nearest-neighbor digraphs.
//!
//! A k-regular digraph `G` is a kNN graph in `R^d` if some injective
//! placement of its vertices makes every vertex's out-neighbors exactly its
//! `k` strictly-nearest other points. On the line this is decided in
//! `O(kn)` time ([`line::decide_1d`]) and realized with exact rational
//! coordinates ([`line::realize_1d`]). In higher dimensions
//! [`approx::embed`] finds placements preserving a `1 - eps` fraction of the
//! edges, and [`lambda::lambda_acyclic`] certifies some graphs impossible in
//! every dimension.

pub mod approx;
pub mod gen;
pub mod graph;
pub mod io;
pub mod lambda;
pub mod line;
pub mod lp;
pub mod ops;
pub mod oracle;
pub mod points;

pub use graph::{DirectedGraph, GraphError, Vertex};
pub use oracle::{knn_graph, sigma_score, verify_realization, ApproxScore, Provenance, Realization};
pub use points::PointSet;
