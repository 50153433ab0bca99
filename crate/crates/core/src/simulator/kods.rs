use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::tree::LabeledTree;
use crate::analysis::{Verdict, Witness};

/// A dominating set `S` with an orientation of the edges inside `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DSolution {
    pub in_set: Vec<bool>,
    /// Edge index to the node the edge points away from.
    pub orientation: BTreeMap<usize, usize>,
}

impl DSolution {
    pub fn outdegree(&self, w: usize) -> usize {
        self.orientation.values().filter(|&&s| s == w).count()
    }

    pub fn is_outgoing(&self, e: usize, w: usize) -> bool {
        self.orientation.get(&e) == Some(&w)
    }
}

/// Sequential greedy by ascending node index: `v` joins `S` unless some
/// earlier neighbor in `S` already has `k` outgoing edges. Edges inside `S`
/// point toward the larger index, so a node's outdegree only grows while
/// later neighbors join.
pub fn greedy_kods(t: &LabeledTree, k: usize) -> DSolution {
    let n = t.n();
    let mut in_set = vec![false; n];
    let mut outdeg = vec![0usize; n];
    let mut orientation = BTreeMap::new();
    for v in 0..n {
        let earlier: Vec<(usize, usize)> = t
            .incident(v)
            .iter()
            .map(|&e| (e, t.edge(e).other(v)))
            .filter(|&(_, u)| u < v && in_set[u])
            .collect();
        if earlier.iter().all(|&(_, u)| outdeg[u] < k) {
            in_set[v] = true;
            for (e, u) in earlier {
                outdeg[u] += 1;
                orientation.insert(e, u);
            }
        }
    }
    DSolution { in_set, orientation }
}

/// Domination, orientation of exactly the edges inside `S`, and outdegree
/// at most `k`.
pub fn check_kods(t: &LabeledTree, sol: &DSolution, k: usize) -> Verdict {
    if sol.in_set.len() != t.n() {
        return Verdict::fail(Witness::Node(0), format!("solution covers {} of {} nodes", sol.in_set.len(), t.n()));
    }
    for w in 0..t.n() {
        if !sol.in_set[w] && !t.neighbors(w).any(|z| sol.in_set[z]) {
            return Verdict::fail(Witness::Node(w), format!("node {w} is not dominated"));
        }
    }
    for (i, e) in t.edges().iter().enumerate() {
        let inside = sol.in_set[e.u] && sol.in_set[e.v];
        match sol.orientation.get(&i) {
            Some(&s) if inside && (s == e.u || s == e.v) => {}
            None if !inside => {}
            _ => {
                return Verdict::fail(Witness::Edge(i), format!("edge {i} ({}-{}) is oriented wrongly", e.u, e.v));
            }
        }
    }
    for w in 0..t.n() {
        let d = sol.outdegree(w);
        if d > k {
            return Verdict::fail(Witness::Node(w), format!("node {w} has outdegree {d} > {k}"));
        }
    }
    let size = sol.in_set.iter().filter(|&&b| b).count();
    Verdict::pass(format!("{size} of {} nodes in S, outdegree at most {k}", t.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::tree::random_tree;

    fn path3() -> LabeledTree {
        LabeledTree::new(3, 2, &[(0, 1, 1, 1), (1, 2, 2, 1)]).unwrap()
    }

    #[test]
    fn path_mis() {
        let sol = greedy_kods(&path3(), 0);
        assert_eq!(sol.in_set, [true, false, true]);
        assert!(check_kods(&path3(), &sol, 0).holds);
    }

    #[test]
    fn k_delta_takes_everything() {
        let t = random_tree(50, 4, 9, false).unwrap();
        let sol = greedy_kods(&t, 4);
        assert!(sol.in_set.iter().all(|&b| b));
        assert!(check_kods(&t, &sol, 4).holds);
    }

    #[test]
    fn random_trees_validate() {
        for seed in 0..100 {
            let t = random_tree(80, 4, seed, false).unwrap();
            for k in 0..=2 {
                let sol = greedy_kods(&t, k);
                let v = check_kods(&t, &sol, k);
                assert!(v.holds, "{}", v.narrative);
            }
        }
    }

    #[test]
    fn violations_are_reported() {
        let t = path3();
        let sol = DSolution {
            in_set: vec![true, false, false],
            orientation: BTreeMap::new(),
        };
        assert!(!check_kods(&t, &sol, 0).holds);
        let sol = DSolution {
            in_set: vec![true, true, true],
            orientation: BTreeMap::from([(0, 0), (1, 1)]),
        };
        assert!(check_kods(&t, &sol, 1).holds);
        assert!(!check_kods(&t, &sol, 0).holds);
    }
}
