//! Matroids, matroid intersection, graph orientation, flows and matchings.

pub mod flow;
pub mod intersection;
pub mod matching;
pub mod matroid;
pub mod orientation;

use thiserror::Error;

pub use flow::FlowNetwork;
pub use intersection::matroid_intersection_max;
pub use matching::bipartite_matching;
pub use matroid::{
    check_matroid_axioms, direct_sum, free_matroid, partition_matroid, truncate, uniform_matroid, IndependenceOracle,
    Matroid,
};
pub use orientation::{orient_half_indegree, MultiGraph, Orientation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatoricsError {
    #[error("matroids have different ground sets ({first} vs {second} elements)")]
    GroundMismatch { first: usize, second: usize },
    #[error("independence oracle is inconsistent: {0}")]
    OracleInconsistent(String),
}
