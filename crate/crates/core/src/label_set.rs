use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::problem::Label;

/// A set of labels, ordered like groups: by size, then by member list.
///
/// Set-labels produced by round elimination are values of this type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelSet(Vec<Label>);

/// A label of a lifted problem before renaming: a set of source labels.
pub type SetLabel = LabelSet;

impl LabelSet {
    pub fn new<I: IntoIterator<Item = Label>>(labels: I) -> Self {
        let set: BTreeSet<Label> = labels.into_iter().collect();
        LabelSet(set.into_iter().collect())
    }

    pub fn members(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.0.binary_search(l).is_ok()
    }

    pub fn is_subset(&self, other: &LabelSet) -> bool {
        self.0.iter().all(|l| other.contains(l))
    }
}

impl Ord for LabelSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for LabelSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}
