//! Bitmask form of constraints over an indexed alphabet.
//!
//! Labels are numbered by their position in the sorted alphabet and sets of
//! labels become `u64` masks, which caps engine alphabets at 64 labels.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::engine::EngineError;
use crate::matching::{exact_cover, saturate_left};
use crate::problem::{Constraint, Label};

pub(crate) type Mask = u64;

pub(crate) const MAX_ALPHABET: usize = 64;

/// A plain configuration as sorted label indices.
pub(crate) type Plain = Vec<u8>;

#[derive(Debug, Clone)]
pub(crate) struct Index {
    labels: Vec<Label>,
}

impl Index {
    pub(crate) fn new(labels: &[Label]) -> Result<Self, EngineError> {
        if labels.len() > MAX_ALPHABET {
            return Err(EngineError::AlphabetTooLarge {
                size: labels.len(),
                max: MAX_ALPHABET,
            });
        }
        let mut labels = labels.to_vec();
        labels.sort();
        labels.dedup();
        Ok(Index { labels })
    }

    pub(crate) fn len(&self) -> usize {
        self.labels.len()
    }

    pub(crate) fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub(crate) fn pos(&self, label: &Label) -> Option<usize> {
        self.labels.binary_search(label).ok()
    }

    pub(crate) fn mask<'a, I: IntoIterator<Item = &'a Label>>(&self, labels: I) -> Option<Mask> {
        let mut m = 0;
        for l in labels {
            m |= 1u64 << self.pos(l)?;
        }
        Some(m)
    }

    pub(crate) fn labels_of(&self, mask: Mask) -> Vec<Label> {
        bits(mask).map(|i| self.labels[i].clone()).collect()
    }

    pub(crate) fn compile(&self, k: &Constraint) -> Compiled {
        let configs = k
            .configs()
            .iter()
            .map(|c| {
                c.items()
                    .iter()
                    .map(|(g, m)| (self.mask(g.members()).expect("label in index"), *m))
                    .collect()
            })
            .collect();
        Compiled {
            arity: k.arity(),
            configs,
        }
    }
}

pub(crate) fn full_mask(n: usize) -> Mask {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn bits(mut mask: Mask) -> impl Iterator<Item = usize> {
    core::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// A constraint as a list of `(group mask, multiplicity)` configurations.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub(crate) arity: usize,
    pub(crate) configs: Vec<Vec<(Mask, usize)>>,
}

fn counts(plain: &[u8]) -> Vec<(u8, usize)> {
    let mut out: Vec<(u8, usize)> = Vec::new();
    for &l in plain {
        match out.last_mut() {
            Some((last, c)) if *last == l => *c += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}

impl Compiled {
    /// Multiset membership of a plain configuration, by exact cover against
    /// each condensed configuration.
    pub(crate) fn contains(&self, plain: &[u8]) -> bool {
        if plain.len() != self.arity {
            return false;
        }
        let counts = counts(plain);
        self.configs.iter().any(|cfg| fits(&counts, cfg, true))
    }

    /// Whether the partial configuration can be completed to a member.
    pub(crate) fn extendable(&self, partial: &[u8]) -> bool {
        if partial.len() > self.arity {
            return false;
        }
        let counts = counts(partial);
        self.configs.iter().any(|cfg| fits(&counts, cfg, false))
    }

    /// All plain members, deduplicated as multisets.
    pub(crate) fn expansion(&self, cap: usize) -> Result<BTreeSet<Plain>, EngineError> {
        let mut out = BTreeSet::new();
        for cfg in &self.configs {
            expand_into(cfg, cap, &mut out)?;
        }
        Ok(out)
    }
}

fn fits(counts: &[(u8, usize)], cfg: &[(Mask, usize)], exact: bool) -> bool {
    let mut covered = 0;
    for (m, _) in cfg {
        covered |= m;
    }
    if counts.iter().any(|(l, _)| covered & (1 << l) == 0) {
        return false;
    }
    let left: Vec<usize> = counts.iter().map(|(_, c)| *c).collect();
    let right: Vec<usize> = cfg.iter().map(|(_, m)| *m).collect();
    let adj = |i: usize, j: usize| cfg[j].0 & (1 << counts[i].0) != 0;
    if exact {
        exact_cover(&left, &right, adj).is_some()
    } else {
        saturate_left(&left, &right, adj).is_some()
    }
}

/// Expands one condensed configuration; each group of multiplicity `m`
/// contributes every multiset of size `m` over its members.
pub(crate) fn expand_into(
    cfg: &[(Mask, usize)],
    cap: usize,
    out: &mut BTreeSet<Plain>,
) -> Result<(), EngineError> {
    let groups: Vec<(Vec<u8>, usize)> = cfg
        .iter()
        .map(|(m, k)| (bits(*m).map(|i| i as u8).collect(), *k))
        .collect();
    let mut current = Vec::new();
    expand_rec(&groups, 0, 0, &mut current, cap, out)
}

fn expand_rec(
    groups: &[(Vec<u8>, usize)],
    g: usize,
    start: usize,
    current: &mut Vec<u8>,
    cap: usize,
    out: &mut BTreeSet<Plain>,
) -> Result<(), EngineError> {
    if g == groups.len() {
        let mut c = current.clone();
        c.sort_unstable();
        out.insert(c);
        if out.len() > cap {
            return Err(EngineError::BlowUp {
                what: "expanded configurations",
                limit: cap,
                stats: Default::default(),
            });
        }
        return Ok(());
    }
    let (members, mult) = &groups[g];
    let placed = current.len() - groups[..g].iter().map(|(_, m)| m).sum::<usize>();
    if placed == *mult {
        return expand_rec(groups, g + 1, 0, current, cap, out);
    }
    for idx in start..members.len() {
        current.push(members[idx]);
        expand_rec(groups, g, idx, current, cap, out)?;
        current.pop();
    }
    Ok(())
}

/// Selections from a tuple of sets, as sorted multisets.
pub(crate) fn selections(slots: &[Mask]) -> BTreeSet<Plain> {
    let mut out = BTreeSet::new();
    let mut current = vec![0u8; slots.len()];
    select_rec(slots, 0, &mut current, &mut out);
    out
}

fn select_rec(slots: &[Mask], i: usize, current: &mut Vec<u8>, out: &mut BTreeSet<Plain>) {
    if i == slots.len() {
        let mut c = current.clone();
        c.sort_unstable();
        out.insert(c);
        return;
    }
    for b in bits(slots[i]) {
        current[i] = b as u8;
        select_rec(slots, i + 1, current, out);
    }
}
