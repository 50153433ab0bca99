//! Round elimination for locally checkable problems on regular trees.
//!
//! Problems are given in node-edge form: a node constraint over `delta`-ary
//! multisets of labels and an edge constraint over pairs. [`re`] and [`rere`]
//! compute the two halves of a round-elimination step, and [`family`] holds
//! the parametrized problems used to build lower-bound sequences.
#![no_std]

extern crate alloc;

pub mod analysis;
mod compiled;
pub mod diagram;
pub mod engine;
pub mod expand;
pub mod family;
pub mod label_set;
mod matching;
pub mod problem;
pub mod rename;
pub mod round_elim;
pub mod simulator;
pub mod text;

pub use diagram::{at_least_as_strong, build_diagram, build_diagram_with, is_right_closed, right_closed_sets, Diagram};
pub use engine::{EngineError, Limits, Options, Stats};
pub use expand::{config_in_constraint, expand_config};
pub use label_set::{LabelSet, SetLabel};
pub use problem::{labels, CondensedConfig, Constraint, Group, Label, Problem, ProblemError, Side};
pub use rename::{problems_isomorphic, rename_problem, RenameError, RenamingMap};
pub use round_elim::{
    lift_exists_constraint, maximal_set_configs, re, rere, universal_membership, LiftedProblem,
    SetConfig, Transform,
};
pub use text::{parse_config, parse_problem, serialize_constraint, serialize_problem};
