//! Labels, condensed configurations, constraints and problems.
//!
//! Every value here is kept in canonical form: labels sort lexicographically,
//! groups sort by `(size, member list)`, the items of a configuration sort by
//! group with equal groups merged, and the configurations of a constraint sort
//! by their textual form. Two values are equal exactly when their canonical
//! forms are equal.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use thiserror::Error;

/// Errors raised while building problems or their parts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("invalid label `{0}` (expected [A-Z][A-Z0-9']*)")]
    InvalidLabel(String),
    #[error("empty disjunction group")]
    EmptyGroup,
    #[error("configuration has arity {found}, expected {expected}")]
    Arity { expected: usize, found: usize },
    #[error("delta must be at least 2, got {0}")]
    Delta(usize),
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
}

/// An atomic output label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(name: &str) -> Result<Self, ProblemError> {
        if is_label(name) {
            Ok(Label(name.to_string()))
        } else {
            Err(ProblemError::InvalidLabel(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Fresh name number `index` in the sequence `A, B, .., Z, AA, AB, ..`.
    pub fn fresh(index: usize) -> Self {
        let mut n = index + 1;
        let mut bytes = Vec::new();
        while n > 0 {
            n -= 1;
            bytes.push(b'A' + (n % 26) as u8);
            n /= 26;
        }
        bytes.reverse();
        Label(String::from_utf8(bytes).expect("ascii"))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl core::str::FromStr for Label {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::new(s)
    }
}

pub(crate) fn is_label(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '\'')
}

/// Parses a whitespace separated list of labels. Panics on invalid input, so
/// it is meant for literals in constructors and tests.
pub fn labels(spec: &str) -> Vec<Label> {
    spec.split_whitespace()
        .map(|s| Label::new(s).expect("valid label literal"))
        .collect()
}

/// A nonempty disjunction of labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Group {
    members: Vec<Label>,
}

impl Group {
    pub fn new<I: IntoIterator<Item = Label>>(members: I) -> Result<Self, ProblemError> {
        let set: BTreeSet<Label> = members.into_iter().collect();
        if set.is_empty() {
            return Err(ProblemError::EmptyGroup);
        }
        Ok(Group {
            members: set.into_iter().collect(),
        })
    }

    pub fn single(label: Label) -> Self {
        Group {
            members: alloc::vec![label],
        }
    }

    pub fn members(&self) -> &[Label] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.members.binary_search(label).is_ok()
    }
}

impl Ord for Group {
    fn cmp(&self, other: &Self) -> Ordering {
        self.members
            .len()
            .cmp(&other.members.len())
            .then_with(|| self.members.cmp(&other.members))
    }
}

impl PartialOrd for Group {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [single] = self.members.as_slice() {
            return write!(f, "{single}");
        }
        f.write_str("[")?;
        for (i, l) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("]")
    }
}

/// A configuration with disjunction groups, stored as a multiset of
/// `(group, multiplicity)` items.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CondensedConfig {
    items: Vec<(Group, usize)>,
}

impl CondensedConfig {
    /// Canonicalizes `items`: zero multiplicities are dropped and equal groups
    /// merged.
    pub fn new<I: IntoIterator<Item = (Group, usize)>>(items: I) -> Self {
        let mut items: Vec<(Group, usize)> = items.into_iter().filter(|(_, m)| *m > 0).collect();
        items.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Group, usize)> = Vec::with_capacity(items.len());
        for (g, m) in items {
            match merged.last_mut() {
                Some((last, count)) if *last == g => *count += m,
                _ => merged.push((g, m)),
            }
        }
        CondensedConfig { items: merged }
    }

    /// A configuration without disjunctions.
    pub fn plain<I: IntoIterator<Item = Label>>(labels: I) -> Self {
        Self::new(labels.into_iter().map(|l| (Group::single(l), 1)))
    }

    pub fn items(&self) -> &[(Group, usize)] {
        &self.items
    }

    pub fn arity(&self) -> usize {
        self.items.iter().map(|(_, m)| m).sum()
    }

    pub fn is_plain(&self) -> bool {
        self.items.iter().all(|(g, _)| g.is_singleton())
    }

    /// Labels of a plain configuration with repetition, in canonical order.
    /// Groups with several members contribute their first member.
    pub fn plain_labels(&self) -> Vec<Label> {
        let mut out = Vec::with_capacity(self.arity());
        for (g, m) in &self.items {
            for _ in 0..*m {
                out.push(g.members[0].clone());
            }
        }
        out
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.items.iter().flat_map(|(g, _)| g.members.iter())
    }
}

impl fmt::Display for CondensedConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (g, m)) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
            if *m > 1 {
                write!(f, "^{m}")?;
            }
        }
        Ok(())
    }
}

/// A set of condensed configurations of one arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    arity: usize,
    configs: Vec<CondensedConfig>,
}

impl Constraint {
    pub fn new<I: IntoIterator<Item = CondensedConfig>>(
        arity: usize,
        configs: I,
    ) -> Result<Self, ProblemError> {
        let mut configs: Vec<CondensedConfig> = configs.into_iter().collect();
        for c in &configs {
            if c.arity() != arity {
                return Err(ProblemError::Arity {
                    expected: arity,
                    found: c.arity(),
                });
            }
        }
        configs.sort_by_cached_key(|c| c.to_string());
        configs.dedup();
        Ok(Constraint { arity, configs })
    }

    pub fn empty(arity: usize) -> Self {
        Constraint {
            arity,
            configs: Vec::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn configs(&self) -> &[CondensedConfig] {
        &self.configs
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.configs.iter().flat_map(|c| c.labels().cloned()).collect()
    }
}

/// A locally checkable problem on `delta`-regular trees.
#[derive(Debug, Clone)]
pub struct Problem {
    delta: usize,
    alphabet: Vec<Label>,
    node: Constraint,
    edge: Constraint,
    /// Free-form provenance. Not part of equality or the text format.
    pub note: String,
}

impl PartialEq for Problem {
    fn eq(&self, other: &Self) -> bool {
        self.delta == other.delta
            && self.alphabet == other.alphabet
            && self.node == other.node
            && self.edge == other.edge
    }
}

impl Eq for Problem {}

impl Problem {
    /// Builds a problem; the alphabet is the set of labels used.
    pub fn new(delta: usize, node: Constraint, edge: Constraint) -> Result<Self, ProblemError> {
        if delta < 2 {
            return Err(ProblemError::Delta(delta));
        }
        if node.arity() != delta {
            return Err(ProblemError::Arity {
                expected: delta,
                found: node.arity(),
            });
        }
        if edge.arity() != 2 {
            return Err(ProblemError::Arity {
                expected: 2,
                found: edge.arity(),
            });
        }
        let mut alphabet = node.labels();
        alphabet.extend(edge.labels());
        Ok(Problem {
            delta,
            alphabet: alphabet.into_iter().collect(),
            node,
            edge,
            note: String::new(),
        })
    }

    /// Builds a problem from configuration lines in the text grammar.
    pub fn from_lines(delta: usize, node: &[&str], edge: &[&str]) -> Result<Self, ProblemError> {
        let parse = |arity: usize, lines: &[&str]| -> Result<Constraint, ProblemError> {
            let configs = lines
                .iter()
                .enumerate()
                .map(|(i, l)| crate::text::parse_config(l, i + 1))
                .collect::<Result<Vec<_>, _>>()?;
            Constraint::new(arity, configs)
        };
        Problem::new(delta, parse(delta, node)?, parse(2, edge)?)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }

    pub fn node_constraint(&self) -> &Constraint {
        &self.node
    }

    pub fn edge_constraint(&self) -> &Constraint {
        &self.edge
    }

    pub fn constraint(&self, side: Side) -> &Constraint {
        match side {
            Side::Node => &self.node,
            Side::Edge => &self.edge,
        }
    }
}

/// Which constraint of a problem an operation looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Node,
    Edge,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Node => "node",
            Side::Edge => "edge",
        })
    }
}
