//! Port-numbered trees with optional edge colorings and half-edge labels,
//! plus the explicit label transformations between the family's problems.

use alloc::string::String;

use thiserror::Error;

mod kods;
mod labeling;
mod transform;
mod tree;

pub use kods::{check_kods, greedy_kods, DSolution};
pub use labeling::{check_labeling, generate_valid_labeling, LabelingReport};
pub use transform::{kods_to_family_labeling, plus_to_family_transform, weaken_labeling};
pub use tree::{complete_tree, proper_edge_coloring, random_tree, Edge, LabeledTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("a tree needs at least one node")]
    Empty,
    #[error("no tree with these parameters")]
    Infeasible,
    #[error("malformed tree: {0}")]
    Malformed(&'static str),
    #[error("node {node} exceeds the degree cap")]
    DegreeExceeded { node: usize },
    #[error("node {node} has no label on edge {edge}")]
    MissingLabel { node: usize, edge: usize },
    #[error("the transform needs an edge coloring")]
    MissingColoring,
    #[error("input labeling is invalid: {0}")]
    InvalidInput(String),
    #[error("dominating set solution is invalid: {0}")]
    InvalidSolution(String),
    #[error("parameters: {0}")]
    Params(&'static str),
    #[error("edge {edge} is labeled A A")]
    Collision { edge: usize },
}
