//! The two halves of an automatic round-elimination step.
//!
//! `re` makes the edge constraint universal: its configurations are the
//! maximal pairs of label sets all of whose selections are allowed edges. The
//! node constraint then becomes existential: a tuple of sets is allowed when
//! some selection is an allowed node configuration. `rere` is the same with
//! the roles of nodes and edges exchanged.
//!
//! Maximal configurations only ever use right-closed sets, so the search
//! enumerates multisets of right-closed candidates, pruning partial tuples
//! whose selections cannot be completed. A set's selections only need to be
//! checked on its weakest labels: if a configuration with a weak label is
//! allowed, so is the one with any stronger label in its place.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::compiled::{bits, full_mask, selections, Compiled, Index, Mask, Plain};
use crate::diagram::{strength_masks, upsets};
use crate::engine::{EngineError, Options, Stats};
use crate::label_set::{LabelSet, SetLabel};
use crate::problem::{CondensedConfig, Constraint, Group, Label, Problem, Side};

/// A configuration whose slots hold label sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetConfig {
    slots: Vec<(SetLabel, usize)>,
}

impl SetConfig {
    pub fn new<I: IntoIterator<Item = (SetLabel, usize)>>(slots: I) -> Self {
        let mut slots: Vec<(SetLabel, usize)> = slots.into_iter().filter(|(_, m)| *m > 0).collect();
        slots.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(SetLabel, usize)> = Vec::with_capacity(slots.len());
        for (s, m) in slots {
            match merged.last_mut() {
                Some((last, n)) if *last == s => *n += m,
                _ => merged.push((s, m)),
            }
        }
        SetConfig { slots: merged }
    }

    pub fn from_sets<I: IntoIterator<Item = SetLabel>>(sets: I) -> Self {
        Self::new(sets.into_iter().map(|s| (s, 1)))
    }

    pub fn slots(&self) -> &[(SetLabel, usize)] {
        &self.slots
    }

    pub fn arity(&self) -> usize {
        self.slots.iter().map(|(_, m)| m).sum()
    }

    /// One entry per slot, multiplicities unrolled.
    pub fn unrolled(&self) -> Vec<&SetLabel> {
        self.slots
            .iter()
            .flat_map(|(s, m)| core::iter::repeat_n(s, *m))
            .collect()
    }
}

impl fmt::Display for SetConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, m)) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
            if *m > 1 {
                write!(f, "^{m}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Re,
    Rere,
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transform::Re => "re",
            Transform::Rere => "rere",
        })
    }
}

/// Output of `re`/`rere`: a problem over fresh atomic labels together with
/// the set each fresh label stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedProblem {
    pub problem: Problem,
    /// `(fresh label, set of source labels)`, in canonical set order.
    pub dictionary: Vec<(Label, SetLabel)>,
    pub transform: Transform,
    pub source_note: String,
}

impl LiftedProblem {
    pub fn set_of(&self, l: &Label) -> Option<&SetLabel> {
        self.dictionary.iter().find(|(n, _)| n == l).map(|(_, s)| s)
    }

    pub fn name_of(&self, s: &SetLabel) -> Option<&Label> {
        self.dictionary.iter().find(|(_, t)| t == s).map(|(n, _)| n)
    }

    /// Node configurations of the lifted problem with fresh names replaced by
    /// their sets. Only meaningful for plain configurations.
    pub fn set_configs(&self, side: Side) -> Vec<SetConfig> {
        self.problem
            .constraint(side)
            .configs()
            .iter()
            .map(|c| {
                SetConfig::new(c.items().iter().map(|(g, m)| {
                    (self.set_of(&g.members()[0]).expect("dictionary").clone(), *m)
                }))
            })
            .collect()
    }
}

/// The compiled view of one constraint used by the searches.
pub(crate) struct Universe {
    pub(crate) index: Index,
    pub(crate) compiled: Compiled,
    pub(crate) stronger: Vec<Mask>,
}

impl Universe {
    pub(crate) fn new(k: &Constraint, alphabet: &[Label], opts: &Options) -> Result<Self, EngineError> {
        let mut labels: Vec<Label> = alphabet.to_vec();
        labels.extend(k.labels());
        let index = Index::new(&labels)?;
        let compiled = index.compile(k);
        let stronger = strength_masks(&compiled, index.len(), &opts.limits)?;
        Ok(Universe {
            index,
            compiled,
            stronger,
        })
    }

    /// Weakest labels of `set`, one per equivalence class.
    pub(crate) fn minimal(&self, set: Mask) -> Mask {
        let mut out = 0;
        for y in bits(set) {
            let dominated = bits(set).any(|z| {
                z != y
                    && self.stronger[z] & (1 << y) != 0
                    && (self.stronger[y] & (1 << z) == 0 || z < y)
            });
            if !dominated {
                out |= 1 << y;
            }
        }
        out
    }

    pub(crate) fn upclose(&self, set: Mask) -> Mask {
        bits(set).fold(set, |acc, i| acc | self.stronger[i])
    }

    /// Every selection from `slots` is a member of the constraint.
    pub(crate) fn universal(&self, slots: &[Mask]) -> bool {
        if slots.len() != self.compiled.arity {
            return false;
        }
        let mut partial: BTreeSet<Plain> = BTreeSet::new();
        partial.insert(Plain::new());
        for &s in slots {
            match self.extend(&partial, s) {
                Some(next) => partial = next,
                None => return false,
            }
        }
        true
    }

    /// Extends each partial selection by the weakest labels of `slot`,
    /// failing as soon as one cannot be completed.
    fn extend(&self, partial: &BTreeSet<Plain>, slot: Mask) -> Option<BTreeSet<Plain>> {
        let reps = self.minimal(slot);
        if reps == 0 {
            return None;
        }
        let mut next = BTreeSet::new();
        for sel in partial {
            for y in bits(reps) {
                let mut s = sel.clone();
                let at = s.partition_point(|&v| v < y as u8);
                s.insert(at, y as u8);
                if next.contains(&s) {
                    continue;
                }
                if !self.compiled.extendable(&s) {
                    return None;
                }
                next.insert(s);
            }
        }
        Some(next)
    }

    fn candidates(&self) -> Vec<Mask> {
        let mut c = upsets(&self.stronger);
        c.sort_by_key(|&m| self.index.labels_of(m).len());
        c.sort_by(|&a, &b| {
            LabelSet::new(self.index.labels_of(a)).cmp(&LabelSet::new(self.index.labels_of(b)))
        });
        c
    }

    /// Maximal universal tuples over right-closed candidates. Each result is
    /// a nondecreasing list of candidate masks.
    pub(crate) fn maximal(&self, opts: &Options) -> Result<Vec<Vec<Mask>>, EngineError> {
        let candidates = self.candidates();
        let mut search = MaxSearch {
            universe: self,
            candidates: &candidates,
            opts,
            stats: Stats::default(),
            tuple: Vec::with_capacity(self.compiled.arity),
            out: Vec::new(),
        };
        let mut root = BTreeSet::new();
        root.insert(Plain::new());
        search.dfs(0, &root)?;
        opts.checkpoint(search.stats)?;
        Ok(search.out)
    }

    fn is_maximal(&self, tuple: &[Mask]) -> bool {
        let full = full_mask(self.index.len());
        let mut trial = tuple.to_vec();
        for j in 0..tuple.len() {
            if j > 0 && tuple[j] == tuple[j - 1] {
                continue;
            }
            for l in bits(full & !tuple[j]) {
                trial[j] = self.upclose(tuple[j] | 1 << l);
                if self.universal(&trial) {
                    return false;
                }
            }
            trial[j] = tuple[j];
        }
        true
    }
}

struct MaxSearch<'a, 'o> {
    universe: &'a Universe,
    candidates: &'a [Mask],
    opts: &'a Options<'o>,
    stats: Stats,
    tuple: Vec<Mask>,
    out: Vec<Vec<Mask>>,
}

impl MaxSearch<'_, '_> {
    fn dfs(&mut self, start: usize, partial: &BTreeSet<Plain>) -> Result<(), EngineError> {
        let arity = self.universe.compiled.arity;
        if self.tuple.len() == arity {
            if self.universe.is_maximal(&self.tuple) {
                self.out.push(self.tuple.clone());
                self.stats.found += 1;
                if self.out.len() > self.opts.limits.max_configs {
                    return Err(EngineError::BlowUp {
                        what: "configurations",
                        limit: self.opts.limits.max_configs,
                        stats: self.stats,
                    });
                }
            }
            return Ok(());
        }
        for ci in start..self.candidates.len() {
            self.stats.explored += 1;
            if self.stats.explored % 4096 == 0 {
                self.opts.checkpoint(self.stats)?;
            }
            let cand = self.candidates[ci];
            let Some(next) = self.universe.extend(partial, cand) else {
                continue;
            };
            self.tuple.push(cand);
            self.dfs(ci, &next)?;
            self.tuple.pop();
        }
        Ok(())
    }
}

/// Direct check: every selection of one member per slot is in `k`.
pub fn universal_membership(t: &[SetLabel], k: &Constraint) -> Result<bool, EngineError> {
    if t.len() != k.arity() {
        return Ok(false);
    }
    let mut labels: Vec<Label> = t.iter().flat_map(|s| s.members().iter().cloned()).collect();
    labels.extend(k.labels());
    let index = Index::new(&labels)?;
    let compiled = index.compile(k);
    let slots: Vec<Mask> = t
        .iter()
        .map(|s| index.mask(s.members()).expect("indexed"))
        .collect();
    if slots.contains(&0) {
        return Ok(false);
    }
    Ok(selections(&slots).iter().all(|sel| compiled.contains(sel)))
}

fn to_set_config(index: &Index, tuple: &[Mask]) -> SetConfig {
    SetConfig::from_sets(tuple.iter().map(|&m| LabelSet::new(index.labels_of(m))))
}

/// Maximal set configurations of `k` over right-closed subsets of
/// `alphabet`, in canonical order.
pub fn maximal_set_configs(
    k: &Constraint,
    alphabet: &[Label],
    opts: &Options,
) -> Result<Vec<SetConfig>, EngineError> {
    let universe = Universe::new(k, alphabet, opts)?;
    let tuples = universe.maximal(opts)?;
    if opts.verify_brute_force {
        verify_against_brute_force(&universe, &tuples)?;
    }
    let mut out: Vec<SetConfig> = tuples
        .iter()
        .map(|t| to_set_config(&universe.index, t))
        .collect();
    out.sort();
    Ok(out)
}

/// Replaces every label `y` of every group by the names of all lifted sets
/// containing `y`. Configurations left with an empty group are dropped.
pub fn lift_exists_constraint(k: &Constraint, lifted: &[(Label, SetLabel)]) -> Constraint {
    let mut configs = Vec::new();
    'configs: for c in k.configs() {
        let mut items = Vec::with_capacity(c.items().len());
        for (g, m) in c.items() {
            let names: Vec<Label> = lifted
                .iter()
                .filter(|(_, s)| g.members().iter().any(|y| s.contains(y)))
                .map(|(n, _)| n.clone())
                .collect();
            let Ok(group) = Group::new(names) else {
                continue 'configs;
            };
            items.push((group, *m));
        }
        configs.push(CondensedConfig::new(items));
    }
    Constraint::new(k.arity(), configs).expect("arity preserved")
}

fn eliminate(p: &Problem, universal_side: Side, opts: &Options) -> Result<LiftedProblem, EngineError> {
    let (transform, exists_side) = match universal_side {
        Side::Edge => (Transform::Re, Side::Node),
        Side::Node => (Transform::Rere, Side::Edge),
    };
    let universe = Universe::new(p.constraint(universal_side), p.alphabet(), opts)?;
    let tuples = universe.maximal(opts)?;
    if opts.verify_brute_force {
        verify_against_brute_force(&universe, &tuples)?;
    }

    let used: BTreeSet<Mask> = tuples.iter().flatten().copied().collect();
    if used.len() > opts.limits.max_labels {
        return Err(EngineError::BlowUp {
            what: "set-labels",
            limit: opts.limits.max_labels,
            stats: Stats {
                explored: 0,
                found: tuples.len() as u64,
            },
        });
    }
    let mut sets: Vec<(LabelSet, Mask)> = used
        .iter()
        .map(|&m| (LabelSet::new(universe.index.labels_of(m)), m))
        .collect();
    sets.sort();
    let dictionary: Vec<(Label, SetLabel)> = sets
        .iter()
        .enumerate()
        .map(|(i, (s, _))| (Label::fresh(i), s.clone()))
        .collect();
    let name_of = |m: Mask| -> Label {
        let i = sets.iter().position(|(_, x)| *x == m).expect("used set");
        dictionary[i].0.clone()
    };

    let universal = Constraint::new(
        universe.compiled.arity,
        tuples
            .iter()
            .map(|t| CondensedConfig::plain(t.iter().map(|&m| name_of(m)))),
    )
    .expect("arity");
    let existential = lift_exists_constraint(p.constraint(exists_side), &dictionary);
    let (node, edge) = match universal_side {
        Side::Edge => (existential, universal),
        Side::Node => (universal, existential),
    };
    let problem = Problem::new(p.delta(), node, edge)
        .expect("valid shape")
        .with_note(alloc::format!("{transform} of {}", if p.note.is_empty() { "problem" } else { &p.note }));
    Ok(LiftedProblem {
        problem,
        dictionary,
        transform,
        source_note: p.note.clone(),
    })
}

/// `re(p)`: universal maximal edge configurations, existential node lift.
pub fn re(p: &Problem, opts: &Options) -> Result<LiftedProblem, EngineError> {
    eliminate(p, Side::Edge, opts)
}

/// `rere(p)`: universal maximal node configurations, existential edge lift.
pub fn rere(p: &Problem, opts: &Options) -> Result<LiftedProblem, EngineError> {
    eliminate(p, Side::Node, opts)
}

const BRUTE_FORCE_MAX_LABELS: usize = 6;

/// Unrestricted search over all nonempty subsets with a pairwise maximality
/// filter.
fn verify_against_brute_force(universe: &Universe, tuples: &[Vec<Mask>]) -> Result<(), EngineError> {
    let n = universe.index.len();
    if n > BRUTE_FORCE_MAX_LABELS {
        return Ok(());
    }
    let subsets: Vec<Mask> = (1..=full_mask(n)).collect();
    let arity = universe.compiled.arity;
    let mut all: Vec<Vec<Mask>> = Vec::new();
    let mut tuple = Vec::with_capacity(arity);
    brute_rec(universe, &subsets, 0, &mut tuple, &mut all);
    let dominated = |a: &[Mask], b: &[Mask]| a != b && relaxes(a, b);
    let maximal: BTreeSet<Vec<Mask>> = all
        .iter()
        .filter(|a| !all.iter().any(|b| dominated(a, b)))
        .cloned()
        .collect();
    let ours: BTreeSet<Vec<Mask>> = tuples
        .iter()
        .map(|t| {
            let mut t = t.clone();
            t.sort_unstable();
            t
        })
        .collect();
    let maximal: BTreeSet<Vec<Mask>> = maximal
        .into_iter()
        .map(|mut t| {
            t.sort_unstable();
            t
        })
        .collect();
    if ours == maximal {
        Ok(())
    } else {
        Err(EngineError::BruteForceMismatch("maximal set configurations"))
    }
}

fn brute_rec(
    universe: &Universe,
    subsets: &[Mask],
    start: usize,
    tuple: &mut Vec<Mask>,
    out: &mut Vec<Vec<Mask>>,
) {
    if tuple.len() == universe.compiled.arity {
        if selections(tuple).iter().all(|s| universe.compiled.contains(s)) {
            out.push(tuple.clone());
        }
        return;
    }
    for i in start..subsets.len() {
        tuple.push(subsets[i]);
        brute_rec(universe, subsets, i, tuple, out);
        tuple.pop();
    }
}

/// Whether slots `a` fit injectively into superset slots of `b`.
pub(crate) fn relaxes(a: &[Mask], b: &[Mask]) -> bool {
    let ones_a = alloc::vec![1usize; a.len()];
    let ones_b = alloc::vec![1usize; b.len()];
    crate::matching::exact_cover(&ones_a, &ones_b, |i, j| a[i] & !b[j] == 0).is_some()
}
