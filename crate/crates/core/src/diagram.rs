//! Strength relations between labels, their Hasse diagrams, and right-closed
//! label sets.
//!
//! Label `a` is at least as strong as `b` with respect to a constraint when
//! replacing one occurrence of `b` by `a` in any member configuration keeps it
//! a member. The relation is a preorder; labels that are mutually at least as
//! strong form an equivalence class and stay distinct labels.

use alloc::vec;
use alloc::vec::Vec;

use crate::compiled::{bits, Compiled, Index, Mask};
use crate::engine::{EngineError, Limits};
use crate::expand::{config_in_constraint, expand_config};
use crate::label_set::LabelSet;
use crate::problem::{CondensedConfig, Constraint, Label, Problem, Side};

/// Direct check of the definition on `k`'s expansion.
pub fn at_least_as_strong(a: &Label, b: &Label, k: &Constraint) -> bool {
    if a == b {
        return true;
    }
    for cond in k.configs() {
        for plain in expand_config(cond) {
            let mut labels = plain.plain_labels();
            let Some(pos) = labels.iter().position(|l| l == b) else {
                continue;
            };
            labels[pos] = a.clone();
            if !config_in_constraint(&CondensedConfig::plain(labels), k) {
                return false;
            }
        }
    }
    true
}

/// `stronger[b]` is the mask of labels at least as strong as `b`.
pub(crate) fn strength_masks(
    compiled: &Compiled,
    n: usize,
    limits: &Limits,
) -> Result<Vec<Mask>, EngineError> {
    let full = crate::compiled::full_mask(n);
    let mut stronger = vec![full; n];
    let expansion = compiled.expansion(limits.max_expansion)?;
    let mut scratch = Vec::with_capacity(compiled.arity);
    for plain in &expansion {
        let mut prev = None;
        for (pos, &b) in plain.iter().enumerate() {
            if prev == Some(b) {
                continue;
            }
            prev = Some(b);
            let b = b as usize;
            for a in bits(stronger[b] & !(1 << b)) {
                scratch.clear();
                scratch.extend_from_slice(plain);
                scratch[pos] = a as u8;
                scratch.sort_unstable();
                if !expansion.contains(&scratch) {
                    stronger[b] &= !(1 << a);
                }
            }
        }
    }
    Ok(stronger)
}

/// All nonempty up-sets of the preorder given by `stronger`.
pub(crate) fn upsets(stronger: &[Mask]) -> Vec<Mask> {
    let n = stronger.len();
    let weaker: Vec<Mask> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| stronger[j] & (1 << i) != 0)
                .fold(0, |m, j| m | 1 << j)
        })
        .collect();
    let mut out = Vec::new();
    upsets_rec(stronger, &weaker, 0, 0, 0, &mut out);
    out.retain(|&m| m != 0);
    out
}

fn upsets_rec(
    stronger: &[Mask],
    weaker: &[Mask],
    i: usize,
    included: Mask,
    excluded: Mask,
    out: &mut Vec<Mask>,
) {
    if i == stronger.len() {
        out.push(included);
        return;
    }
    if (included | excluded) & (1 << i) != 0 {
        upsets_rec(stronger, weaker, i + 1, included, excluded, out);
        return;
    }
    let inc = included | stronger[i];
    if inc & excluded == 0 {
        upsets_rec(stronger, weaker, i + 1, inc, excluded, out);
    }
    let exc = excluded | weaker[i];
    if exc & included == 0 {
        upsets_rec(stronger, weaker, i + 1, included, exc, out);
    }
}

/// Hasse diagram of the strength preorder of one constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    side: Side,
    labels: Vec<Label>,
    /// `(from, to)`: `to` is stronger than `from`, with no label strictly in
    /// between.
    edges: Vec<(Label, Label)>,
    /// Classes of mutually-as-strong labels with two or more members.
    classes: Vec<Vec<Label>>,
    stronger: Vec<Mask>,
}

impl Diagram {
    pub(crate) fn from_masks(side: Side, labels: Vec<Label>, stronger: Vec<Mask>) -> Self {
        let n = labels.len();
        let strictly = |a: usize, b: usize| {
            stronger[b] & (1 << a) != 0 && stronger[a] & (1 << b) == 0
        };
        let mut edges = Vec::new();
        for from in 0..n {
            for to in 0..n {
                if !strictly(to, from) {
                    continue;
                }
                let between = (0..n).any(|z| strictly(z, from) && strictly(to, z));
                if !between {
                    edges.push((labels[from].clone(), labels[to].clone()));
                }
            }
        }
        let mut classes = Vec::new();
        let mut seen: Mask = 0;
        for i in 0..n {
            if seen & (1 << i) != 0 {
                continue;
            }
            let class: Vec<usize> = (0..n)
                .filter(|&j| stronger[i] & (1 << j) != 0 && stronger[j] & (1 << i) != 0)
                .collect();
            for &j in &class {
                seen |= 1 << j;
            }
            if class.len() > 1 {
                classes.push(class.iter().map(|&j| labels[j].clone()).collect());
            }
        }
        Diagram {
            side,
            labels,
            edges,
            classes,
            stronger,
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn edges(&self) -> &[(Label, Label)] {
        &self.edges
    }

    pub fn classes(&self) -> &[Vec<Label>] {
        &self.classes
    }

    fn pos(&self, l: &Label) -> Option<usize> {
        self.labels.binary_search(l).ok()
    }

    /// Whether `a` is at least as strong as `b`. Unknown labels are unrelated.
    pub fn at_least_as_strong(&self, a: &Label, b: &Label) -> bool {
        match (self.pos(a), self.pos(b)) {
            (Some(a), Some(b)) => self.stronger[b] & (1 << a) != 0,
            _ => false,
        }
    }

    /// Labels at least as strong as `l`, excluding `l` itself.
    pub fn successors(&self, l: &Label) -> Vec<Label> {
        let Some(i) = self.pos(l) else {
            return Vec::new();
        };
        bits(self.stronger[i] & !(1 << i))
            .map(|j| self.labels[j].clone())
            .collect()
    }
}

/// Computes the strength preorder of `p`'s node or edge constraint on its
/// expansion and reduces it to a Hasse diagram.
pub fn build_diagram(p: &Problem, side: Side) -> Result<Diagram, EngineError> {
    build_diagram_with(p, side, &Limits::default())
}

pub fn build_diagram_with(p: &Problem, side: Side, limits: &Limits) -> Result<Diagram, EngineError> {
    let index = Index::new(p.alphabet())?;
    let compiled = index.compile(p.constraint(side));
    let stronger = strength_masks(&compiled, index.len(), limits)?;
    Ok(Diagram::from_masks(side, index.labels().to_vec(), stronger))
}

/// All nonempty label sets closed upward under the strength order, in
/// canonical set order.
pub fn right_closed_sets(d: &Diagram) -> Vec<LabelSet> {
    let mut sets: Vec<LabelSet> = upsets(&d.stronger)
        .into_iter()
        .map(|m| LabelSet::new(bits(m).map(|i| d.labels[i].clone())))
        .collect();
    sets.sort();
    sets
}

/// Whether every label at least as strong as a member is a member.
pub fn is_right_closed(s: &LabelSet, d: &Diagram) -> bool {
    s.members().iter().all(|l| match d.pos(l) {
        Some(i) => bits(d.stronger[i]).all(|j| s.contains(&d.labels[j])),
        None => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::labels;
    use crate::text::parse_problem;

    fn family_like() -> Problem {
        Problem::from_lines(
            4,
            &["M^3 X", "A^2 X^2", "P O^3"],
            &["M [P A O X]", "O [M A O X]", "P [M X]", "A [M O X]", "X [M P A O X]"],
        )
        .unwrap()
    }

    fn l(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    #[test]
    fn mis_edge_strength() {
        let p = parse_problem("delta: 3\nnodes:\nM^3\nP O^2\nedges:\nM [P O]\nO O").unwrap();
        let e = p.edge_constraint();
        assert!(at_least_as_strong(&l("O"), &l("P"), e));
        assert!(!at_least_as_strong(&l("P"), &l("O"), e));
        assert!(!at_least_as_strong(&l("M"), &l("O"), e));
        assert!(!at_least_as_strong(&l("O"), &l("M"), e));
        assert!(at_least_as_strong(&l("M"), &l("M"), e));
        let d = build_diagram(&p, Side::Edge).unwrap();
        assert_eq!(d.edges(), &[(l("P"), l("O"))]);
    }

    #[test]
    fn family_edge_diagram_shape() {
        let d = build_diagram(&family_like(), Side::Edge).unwrap();
        let mut edges: Vec<(Label, Label)> = d.edges().to_vec();
        edges.sort();
        let expected: Vec<(Label, Label)> = [("A", "O"), ("M", "X"), ("O", "X"), ("P", "A")]
            .iter()
            .map(|(a, b)| (l(a), l(b)))
            .collect();
        assert_eq!(edges, expected);
        assert!(d.classes().is_empty());
    }

    #[test]
    fn family_right_closed_sets() {
        let d = build_diagram(&family_like(), Side::Edge).unwrap();
        let got = right_closed_sets(&d);
        let mut expected: Vec<LabelSet> = ["X", "M X", "O X", "M O X", "A O X", "M A O X", "P A O X", "M P A O X"]
            .iter()
            .map(|s| LabelSet::new(labels(s)))
            .collect();
        expected.sort();
        assert_eq!(got, expected);
        assert!(is_right_closed(&LabelSet::new(labels("P A O X")), &d));
        assert!(!is_right_closed(&LabelSet::new(labels("M")), &d));
        assert!(is_right_closed(&LabelSet::new(d.labels().to_vec()), &d));
    }

    #[test]
    fn single_label_diagram() {
        let p = parse_problem("delta: 2\nnodes:\nX^2\nedges:\nX X").unwrap();
        let d = build_diagram(&p, Side::Edge).unwrap();
        assert_eq!(d.labels().len(), 1);
        assert!(d.edges().is_empty());
    }

    #[test]
    fn chain_has_one_set_per_suffix() {
        // C > B > A in the edge constraint.
        let p = Problem::from_lines(2, &["A B", "C^2"], &["A C", "B [B C]", "C C"]).unwrap();
        let d = build_diagram(&p, Side::Edge).unwrap();
        assert_eq!(right_closed_sets(&d).len(), 3);
    }

    #[test]
    fn mutual_labels_form_a_class() {
        let p = Problem::from_lines(2, &["A B"], &["[A B] C"]).unwrap();
        let d = build_diagram(&p, Side::Edge).unwrap();
        assert_eq!(d.classes(), &[labels("A B")]);
        assert!(d.edges().is_empty());
        // A class is either entirely in or out of every right-closed set.
        for s in right_closed_sets(&d) {
            assert_eq!(s.contains(&l("A")), s.contains(&l("B")));
        }
    }
}
