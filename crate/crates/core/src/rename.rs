//! Label renaming and isomorphism up to renaming.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use thiserror::Error;

use crate::problem::{CondensedConfig, Constraint, Group, Label, Problem, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenameError {
    #[error("label `{0}` has no image")]
    Unmapped(Label),
    #[error("labels `{0}` and `{1}` map to the same target")]
    NotInjective(Label, Label),
}

/// An injective map between labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RenamingMap {
    pairs: BTreeMap<Label, Label>,
}

impl RenamingMap {
    pub fn new<I: IntoIterator<Item = (Label, Label)>>(pairs: I) -> Result<Self, RenameError> {
        let pairs: BTreeMap<Label, Label> = pairs.into_iter().collect();
        let mut seen: BTreeMap<&Label, &Label> = BTreeMap::new();
        for (from, to) in &pairs {
            if let Some(prev) = seen.insert(to, from) {
                return Err(RenameError::NotInjective(prev.clone(), from.clone()));
            }
        }
        Ok(RenamingMap { pairs })
    }

    pub fn identity(labels: &[Label]) -> Self {
        RenamingMap {
            pairs: labels.iter().map(|l| (l.clone(), l.clone())).collect(),
        }
    }

    pub fn get(&self, from: &Label) -> Option<&Label> {
        self.pairs.get(from)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Label, &Label)> {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn inverse(&self) -> RenamingMap {
        RenamingMap {
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }

    fn image(&self, l: &Label) -> Result<Label, RenameError> {
        self.pairs
            .get(l)
            .cloned()
            .ok_or_else(|| RenameError::Unmapped(l.clone()))
    }

    pub fn rename_config(&self, c: &CondensedConfig) -> Result<CondensedConfig, RenameError> {
        let mut items = Vec::with_capacity(c.items().len());
        for (g, m) in c.items() {
            let members = g
                .members()
                .iter()
                .map(|l| self.image(l))
                .collect::<Result<Vec<_>, _>>()?;
            items.push((Group::new(members).expect("nonempty"), *m));
        }
        Ok(CondensedConfig::new(items))
    }

    pub fn rename_constraint(&self, k: &Constraint) -> Result<Constraint, RenameError> {
        let configs = k
            .configs()
            .iter()
            .map(|c| self.rename_config(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Constraint::new(k.arity(), configs).expect("arity preserved"))
    }
}

/// Applies `m` to every label of `p` and re-canonicalizes.
pub fn rename_problem(p: &Problem, m: &RenamingMap) -> Result<Problem, RenameError> {
    for l in p.alphabet() {
        m.image(l)?;
    }
    let node = m.rename_constraint(p.node_constraint())?;
    let edge = m.rename_constraint(p.edge_constraint())?;
    Ok(Problem::new(p.delta(), node, edge)
        .expect("shape preserved")
        .with_note(p.note.clone()))
}

type Shape = Vec<(usize, usize)>;

fn shape(c: &CondensedConfig) -> Shape {
    let mut s: Shape = c.items().iter().map(|(g, m)| (g.len(), *m)).collect();
    s.sort_unstable();
    s
}

fn signatures(p: &Problem) -> BTreeMap<Label, Vec<(Side, Shape, usize, usize)>> {
    let mut sig: BTreeMap<Label, Vec<(Side, Shape, usize, usize)>> =
        p.alphabet().iter().map(|l| (l.clone(), Vec::new())).collect();
    for side in [Side::Node, Side::Edge] {
        for c in p.constraint(side).configs() {
            let sh = shape(c);
            for (g, m) in c.items() {
                for l in g.members() {
                    sig.get_mut(l)
                        .expect("alphabet")
                        .push((side, sh.clone(), g.len(), *m));
                }
            }
        }
    }
    for v in sig.values_mut() {
        v.sort();
    }
    sig
}

/// Finds a bijection `m` with `rename_problem(p1, m) == p2`, if any.
///
/// Candidates are restricted to labels with equal occurrence fingerprints,
/// and every configuration whose labels are all assigned must already map
/// onto a configuration of `p2`.
pub fn problems_isomorphic(p1: &Problem, p2: &Problem) -> Option<RenamingMap> {
    if p1.delta() != p2.delta()
        || p1.alphabet().len() != p2.alphabet().len()
        || p1.node_constraint().len() != p2.node_constraint().len()
        || p1.edge_constraint().len() != p2.edge_constraint().len()
    {
        return None;
    }
    let s1 = signatures(p1);
    let s2 = signatures(p2);
    let mut candidates: Vec<(Label, Vec<Label>)> = s1
        .iter()
        .map(|(l, sig)| {
            let c: Vec<Label> = s2
                .iter()
                .filter(|(_, sig2)| *sig2 == sig)
                .map(|(l2, _)| l2.clone())
                .collect();
            (l.clone(), c)
        })
        .collect();
    if candidates.iter().any(|(_, c)| c.is_empty()) {
        return None;
    }
    candidates.sort_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| a.0.cmp(&b.0)));

    let targets: [BTreeSet<CondensedConfig>; 2] = [
        p2.node_constraint().configs().iter().cloned().collect(),
        p2.edge_constraint().configs().iter().cloned().collect(),
    ];
    let search = Search {
        p1,
        p2,
        candidates: &candidates,
        targets: &targets,
    };
    let mut assigned = BTreeMap::new();
    let mut used = BTreeSet::new();
    search.run(0, &mut assigned, &mut used)
}

struct Search<'a> {
    p1: &'a Problem,
    p2: &'a Problem,
    candidates: &'a [(Label, Vec<Label>)],
    targets: &'a [BTreeSet<CondensedConfig>; 2],
}

impl Search<'_> {
    fn run(
        &self,
        depth: usize,
        assigned: &mut BTreeMap<Label, Label>,
        used: &mut BTreeSet<Label>,
    ) -> Option<RenamingMap> {
        if depth == self.candidates.len() {
            let map = RenamingMap::new(assigned.clone()).ok()?;
            let renamed = rename_problem(self.p1, &map).ok()?;
            return (renamed == *self.p2).then_some(map);
        }
        let (from, options) = &self.candidates[depth];
        for to in options {
            if used.contains(to) {
                continue;
            }
            assigned.insert(from.clone(), to.clone());
            used.insert(to.clone());
            if self.consistent(assigned, from) {
                if let Some(m) = self.run(depth + 1, assigned, used) {
                    return Some(m);
                }
            }
            used.remove(to);
            assigned.remove(from);
        }
        None
    }

    fn consistent(&self, assigned: &BTreeMap<Label, Label>, latest: &Label) -> bool {
        let map = RenamingMap {
            pairs: assigned.clone(),
        };
        for (i, side) in [Side::Node, Side::Edge].into_iter().enumerate() {
            for c in self.p1.constraint(side).configs() {
                if !c.labels().any(|l| l == latest) {
                    continue;
                }
                if let Ok(image) = map.rename_config(c) {
                    if !self.targets[i].contains(&image) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::labels;
    use crate::text::parse_problem;

    fn mis3() -> Problem {
        parse_problem("delta: 3\nnodes:\nM^3\nP O^2\nedges:\nM [P O]\nO O").unwrap()
    }

    fn map(from: &str, to: &str) -> RenamingMap {
        RenamingMap::new(labels(from).into_iter().zip(labels(to))).unwrap()
    }

    #[test]
    fn rename_transports_structure() {
        let p = rename_problem(&mis3(), &map("M P O", "A B C")).unwrap();
        let expected =
            parse_problem("delta: 3\nnodes:\nA^3\nB C^2\nedges:\nA [B C]\nC C").unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn identity_and_inverse() {
        let p = mis3();
        assert_eq!(rename_problem(&p, &RenamingMap::identity(p.alphabet())).unwrap(), p);
        let m = map("M P O", "Q R S");
        let there = rename_problem(&p, &m).unwrap();
        assert_eq!(rename_problem(&there, &m.inverse()).unwrap(), p);
    }

    #[test]
    fn rename_errors() {
        assert!(matches!(
            RenamingMap::new(labels("M P").into_iter().zip(labels("A A"))),
            Err(RenameError::NotInjective(..))
        ));
        assert!(matches!(
            rename_problem(&mis3(), &map("M P", "A B")),
            Err(RenameError::Unmapped(_))
        ));
    }

    #[test]
    fn isomorphism_finds_constructed_witness() {
        let p = mis3();
        let m = map("M P O", "O M P");
        let q = rename_problem(&p, &m).unwrap();
        let found = problems_isomorphic(&p, &q).unwrap();
        assert_eq!(rename_problem(&p, &found).unwrap(), q);
    }

    #[test]
    fn isomorphism_rejects_size_mismatch() {
        let single = parse_problem("delta: 3\nnodes:\nX^3\nedges:\nX X").unwrap();
        assert!(problems_isomorphic(&mis3(), &single).is_none());
    }
}
