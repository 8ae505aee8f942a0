//! Exact construction of every metric space in the lab: level graphs and
//! their chains, scaled unions, binary trees, and recursive sup-norm sets.
//!
//! Construction is single-threaded and deterministic; shortest-path tables
//! may fan out over sources, with results independent of scheduling. All
//! types are immutable once built.

pub mod gamma;
pub mod linf;
pub mod metric;
pub mod scaled;
pub mod tree;

pub use gamma::{build_chain, build_gamma, LevelGraph, SubCopy};
pub use linf::{build_linf_set, linf_split, LinfPointSet, LinfQuadruple, LinfSplit};
pub use metric::FiniteMetricSpace;
pub use scaled::{build_scaled_union, build_scaled_union_graph, ScaledUnionGraph};
pub use tree::{build_tree, Tree};
