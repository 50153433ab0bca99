//! Expansion of condensed configurations and multiset membership.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::matching::exact_cover;
use crate::problem::{CondensedConfig, Constraint, Label};

/// Every plain configuration contained in `c`, as a sorted set.
pub fn expand_config(c: &CondensedConfig) -> Vec<CondensedConfig> {
    let mut out: BTreeSet<Vec<Label>> = BTreeSet::new();
    let mut current = Vec::with_capacity(c.arity());
    expand_rec(c.items(), 0, 0, 0, &mut current, &mut out);
    out.into_iter().map(CondensedConfig::plain).collect()
}

fn expand_rec(
    items: &[(crate::problem::Group, usize)],
    item: usize,
    placed: usize,
    start: usize,
    current: &mut Vec<Label>,
    out: &mut BTreeSet<Vec<Label>>,
) {
    let Some((group, mult)) = items.get(item) else {
        let mut sorted = current.clone();
        sorted.sort();
        out.insert(sorted);
        return;
    };
    if placed == *mult {
        expand_rec(items, item + 1, 0, 0, current, out);
        return;
    }
    for idx in start..group.len() {
        current.push(group.members()[idx].clone());
        expand_rec(items, item, placed + 1, idx, current, out);
        current.pop();
    }
}

/// Whether the plain configuration `c` is contained in some condensed
/// configuration of `k`. Decided by an exact cover of `c`'s labels (with
/// multiplicities) onto each condensed configuration's groups.
pub fn config_in_constraint(c: &CondensedConfig, k: &Constraint) -> bool {
    if c.arity() != k.arity() {
        return false;
    }
    let mut counts: Vec<(Label, usize)> = Vec::new();
    for l in c.plain_labels() {
        match counts.last_mut() {
            Some((last, n)) if *last == l => *n += 1,
            _ => counts.push((l, 1)),
        }
    }
    let left: Vec<usize> = counts.iter().map(|(_, n)| *n).collect();
    k.configs().iter().any(|cond| {
        let right: Vec<usize> = cond.items().iter().map(|(_, m)| *m).collect();
        exact_cover(&left, &right, |i, j| cond.items()[j].0.contains(&counts[i].0)).is_some()
    })
}
