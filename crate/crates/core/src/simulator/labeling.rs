use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tree::LabeledTree;
use super::SimError;
use crate::analysis::{Verdict, Witness};
use crate::expand::{config_in_constraint, expand_config};
use crate::matching::exact_cover;
use crate::problem::{CondensedConfig, Label, Problem};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelingReport {
    pub verdict: Verdict,
    /// Nodes of degree below `delta`, whose node condition is not checked.
    pub exempt: Vec<usize>,
}

/// Checks the node constraint at every node of degree `delta` and the edge
/// constraint on every edge.
pub fn check_labeling(t: &LabeledTree, p: &Problem) -> Result<LabelingReport, SimError> {
    let mut exempt = Vec::new();
    let mut failure = None;
    for w in 0..t.n() {
        let labels = t.node_labels(w)?;
        if t.degree(w) != p.delta() {
            exempt.push(w);
            continue;
        }
        let c = CondensedConfig::plain(labels);
        if failure.is_none() && !config_in_constraint(&c, p.node_constraint()) {
            failure = Some(Verdict::fail(
                Witness::Config(c.clone()),
                format!("node {w} outputs {c}, which is not a node configuration"),
            ));
        }
    }
    for (i, e) in t.edges().iter().enumerate() {
        let pair = e
            .labels
            .iter()
            .map(|l| l.clone().ok_or(SimError::MissingLabel { node: e.u, edge: i }))
            .collect::<Result<Vec<Label>, _>>()?;
        let c = CondensedConfig::plain(pair);
        if failure.is_none() && !config_in_constraint(&c, p.edge_constraint()) {
            failure = Some(Verdict::fail(
                Witness::Config(c.clone()),
                format!("edge {i} ({}-{}) carries {c}, which is not an edge configuration", e.u, e.v),
            ));
        }
    }
    let verdict = failure.unwrap_or_else(|| {
        Verdict::pass(format!(
            "{} nodes checked, {} exempt, {} edges checked",
            t.n() - exempt.len(),
            exempt.len(),
            t.edges().len()
        ))
    });
    Ok(LabelingReport { verdict, exempt })
}

struct Dp<'a> {
    t: &'a LabeledTree,
    delta: usize,
    labels: Vec<Label>,
    edge_ok: Vec<Vec<bool>>,
    /// Node configurations as label-count vectors.
    configs: Vec<Vec<usize>>,
    parent_edge: Vec<Option<usize>>,
    children: Vec<Vec<(usize, usize)>>,
    /// `feasible[c][l]`: the subtree of `c` can be labeled with `l` on `c`'s
    /// side of its parent edge.
    feasible: Vec<Vec<bool>>,
}

impl Dp<'_> {
    /// `good(c, l)`: the parent can put `l` on its side of the edge to `c`.
    fn good(&self, c: usize, l: usize) -> bool {
        (0..self.labels.len()).any(|l2| self.edge_ok[l][l2] && self.feasible[c][l2])
    }

    /// Assigns `counts` to the children of `w`, one label each.
    fn assign(&self, w: usize, counts: &[usize], order: &[usize]) -> Option<Vec<usize>> {
        let kids = &self.children[w];
        let right = vec![1usize; kids.len()];
        let flow = exact_cover(counts, &right, |l, j| self.good(kids[order[j]].0, l))?;
        let mut out = vec![0; kids.len()];
        for (l, row) in flow.iter().enumerate() {
            for (j, &f) in row.iter().enumerate() {
                if f > 0 {
                    out[order[j]] = l;
                }
            }
        }
        Some(out)
    }

    /// Label counts left for the children once `parent` (if any) is placed.
    fn remainders(&self, parent: Option<usize>) -> Vec<Vec<usize>> {
        self.configs
            .iter()
            .filter_map(|c| {
                let mut c = c.clone();
                if let Some(l) = parent {
                    if c[l] == 0 {
                        return None;
                    }
                    c[l] -= 1;
                }
                Some(c)
            })
            .collect()
    }

    fn node_ok(&self, w: usize, parent: Option<usize>) -> bool {
        let identity: Vec<usize> = (0..self.children[w].len()).collect();
        if self.t.degree(w) == self.delta {
            self.remainders(parent)
                .iter()
                .any(|r| self.assign(w, r, &identity).is_some())
        } else {
            self.children[w]
                .iter()
                .all(|&(c, _)| (0..self.labels.len()).any(|l| self.good(c, l)))
        }
    }
}

/// Finds a labeling that passes [`check_labeling`] by dynamic programming
/// over the tree rooted at node 0, then reconstructs one solution with
/// seeded random choices. `None` when no labeling exists.
pub fn generate_valid_labeling(t: &LabeledTree, p: &Problem, seed: u64) -> Option<LabeledTree> {
    let labels: Vec<Label> = p.alphabet().to_vec();
    let nl = labels.len();
    let edge_ok: Vec<Vec<bool>> = (0..nl)
        .map(|i| {
            (0..nl)
                .map(|j| {
                    config_in_constraint(
                        &CondensedConfig::plain([labels[i].clone(), labels[j].clone()]),
                        p.edge_constraint(),
                    )
                })
                .collect()
        })
        .collect();
    let mut configs: BTreeSet<Vec<usize>> = BTreeSet::new();
    for c in p.node_constraint().configs() {
        for plain in expand_config(c) {
            let mut counts = vec![0usize; nl];
            for l in plain.plain_labels() {
                counts[labels.binary_search(&l).expect("alphabet")] += 1;
            }
            configs.insert(counts);
        }
    }

    let n = t.n();
    let mut order = Vec::with_capacity(n);
    let mut parent_edge = vec![None; n];
    let mut children = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(w) = queue.pop_front() {
        order.push(w);
        for &e in t.incident(w) {
            let z = t.edge(e).other(w);
            if !seen[z] {
                seen[z] = true;
                parent_edge[z] = Some(e);
                children[w].push((z, e));
                queue.push_back(z);
            }
        }
    }

    let mut dp = Dp {
        t,
        delta: p.delta(),
        labels,
        edge_ok,
        configs: configs.into_iter().collect(),
        parent_edge,
        children,
        feasible: vec![vec![false; nl]; n],
    };
    for &w in order.iter().rev() {
        if dp.parent_edge[w].is_some() {
            dp.feasible[w] = (0..nl).map(|l| dp.node_ok(w, Some(l))).collect();
        }
    }
    if !dp.node_ok(0, None) {
        return None;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = t.clone();
    out.clear_labels();
    let mut parent_label: Vec<Option<usize>> = vec![None; n];
    for &w in &order {
        let kids = dp.children[w].clone();
        let mut kid_order: Vec<usize> = (0..kids.len()).collect();
        kid_order.shuffle(&mut rng);
        let chosen: Vec<usize> = if t.degree(w) == p.delta() {
            let mut rems = dp.remainders(parent_label[w]);
            rems.shuffle(&mut rng);
            rems.iter()
                .find_map(|r| dp.assign(w, r, &kid_order))
                .expect("feasible node")
        } else {
            kids.iter()
                .map(|&(c, _)| {
                    let options: Vec<usize> = (0..nl).filter(|&l| dp.good(c, l)).collect();
                    *options.choose(&mut rng).expect("feasible child")
                })
                .collect()
        };
        for (i, &(c, e)) in kids.iter().enumerate() {
            let l1 = chosen[i];
            let options: Vec<usize> = (0..nl)
                .filter(|&l2| dp.edge_ok[l1][l2] && dp.feasible[c][l2])
                .collect();
            let l2 = *options.choose(&mut rng).expect("good label");
            out.set_label(w, e, dp.labels[l1].clone());
            out.set_label(c, e, dp.labels[l2].clone());
            parent_label[c] = Some(l2);
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{make_mis_problem, make_plus_problem, FamilyParams};
    use crate::problem::{labels, Constraint};
    use crate::simulator::tree::{complete_tree, random_tree};
    use crate::text::parse_problem;

    #[test]
    fn mis_labelings_exist_and_validate() {
        let p = make_mis_problem(3).unwrap();
        for seed in 0..30 {
            let t = random_tree(40, 3, seed, false).unwrap();
            let l = generate_valid_labeling(&t, &p, seed).expect("MIS exists");
            let r = check_labeling(&l, &p).unwrap();
            assert!(r.verdict.holds, "{}", r.verdict.narrative);
        }
    }

    #[test]
    fn plus_labelings_on_complete_trees() {
        let p = make_plus_problem(FamilyParams::new(4, 3, 0).unwrap()).unwrap();
        let t = complete_tree(4, 3).unwrap();
        let l = generate_valid_labeling(&t, &p, 5).expect("found");
        assert!(check_labeling(&l, &p).unwrap().verdict.holds);
        assert_eq!(l, generate_valid_labeling(&t, &p, 5).unwrap());
    }

    #[test]
    fn unsatisfiable_problem() {
        let p = Problem::new(
            3,
            Constraint::new(3, [CondensedConfig::plain(labels("M M M"))]).unwrap(),
            Constraint::empty(2),
        )
        .unwrap();
        let t = random_tree(5, 3, 1, false).unwrap();
        assert!(generate_valid_labeling(&t, &p, 0).is_none());
    }

    #[test]
    fn single_node_is_vacuous() {
        let p = parse_problem("delta: 3\nnodes:\nM^3\nP O^2\nedges:\nM [P O]\nO O").unwrap();
        let t = random_tree(1, 3, 0, false).unwrap();
        let r = check_labeling(&t, &p).unwrap();
        assert!(r.verdict.holds);
        assert_eq!(r.exempt, [0]);
    }

    #[test]
    fn flipped_label_is_caught() {
        let p = make_mis_problem(3).unwrap();
        let t = complete_tree(3, 3).unwrap();
        let is_m = |l: &LabeledTree, w: usize| l.node_labels(w).unwrap().iter().all(|x| x.as_str() == "M");
        let (mut l, w) = (0..20)
            .find_map(|seed| {
                let l = generate_valid_labeling(&t, &p, seed).unwrap();
                let w = (0..t.n()).find(|&w| t.degree(w) == 3 && is_m(&l, w))?;
                Some((l, w))
            })
            .expect("an M node of full degree");
        let e = t.incident(w)[0];
        l.set_label(w, e, Label::new("P").unwrap());
        let r = check_labeling(&l, &p).unwrap();
        assert!(!r.verdict.holds);
        assert!(matches!(r.verdict.witness, Some(Witness::Config(_))));
    }

    #[test]
    fn missing_labels_are_errors() {
        let p = make_mis_problem(3).unwrap();
        let t = complete_tree(3, 1).unwrap();
        assert!(matches!(check_labeling(&t, &p), Err(SimError::MissingLabel { .. })));
    }
}
