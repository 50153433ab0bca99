use std::collections::BTreeMap;

use roundelim_core::analysis::{zero_round_solvable_symmetric, Witness};
use roundelim_core::family::{
    kods_problem_statement, make_family_problem, make_mis_problem, make_plus_problem, FamilyParams,
};
use roundelim_core::simulator::{
    check_kods, check_labeling, generate_valid_labeling, greedy_kods, random_tree, weaken_labeling,
    DSolution, LabeledTree,
};
use roundelim_core::{parse_problem, problems_isomorphic, CondensedConfig, Constraint, Group, Label, Problem};

fn l(s: &str) -> Label {
    Label::new(s).unwrap()
}

/// `S` nodes write `M`; others write `P` toward their first `S` neighbor, if
/// any, and `O` elsewhere.
fn mis_labeling(t: &LabeledTree, s: &[bool]) -> LabeledTree {
    let mut out = t.clone();
    for w in 0..t.n() {
        let pointer = t.incident(w).iter().copied().find(|&e| s[t.edge(e).other(w)]);
        for &e in t.incident(w) {
            let lab = if s[w] {
                "M"
            } else if Some(e) == pointer {
                "P"
            } else {
                "O"
            };
            out.set_label(w, e, l(lab));
        }
    }
    out
}

#[test]
fn mis_labelings_match_independent_dominating_sets() {
    let p = make_mis_problem(3).unwrap();
    for seed in 0..6 {
        let t = random_tree(10 + seed as usize, 3, seed, false).unwrap();
        let n = t.n();
        for mask in 0u32..(1 << n) {
            let s: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
            let independent = t.edges().iter().all(|e| !(s[e.u] && s[e.v]));
            let dominates_full = (0..n)
                .filter(|&w| t.degree(w) == 3)
                .all(|w| s[w] || t.neighbors(w).any(|z| s[z]));
            let valid = check_labeling(&mis_labeling(&t, &s), &p).unwrap().verdict.holds;
            assert_eq!(valid, independent && dominates_full, "seed {seed} mask {mask:b}");
        }
    }
}

#[test]
fn greedy_mis_is_maximal_independent() {
    for seed in 0..50 {
        let t = random_tree(12, 3, seed, false).unwrap();
        let sol = greedy_kods(&t, 0);
        let s = &sol.in_set;
        assert!(t.edges().iter().all(|e| !(s[e.u] && s[e.v])));
        assert!((0..t.n()).all(|w| s[w] || t.neighbors(w).any(|z| s[z])));
        assert!(sol.orientation.is_empty());
    }
}

#[test]
fn mis_labelings_solve_the_x0_family() {
    let mis = make_mis_problem(4).unwrap();
    for seed in 0..20 {
        let t = random_tree(60, 4, seed, false).unwrap();
        let labeled = generate_valid_labeling(&t, &mis, seed).unwrap();
        for a in 0..=4 {
            let p = make_family_problem(FamilyParams::new(4, a, 0).unwrap());
            assert!(check_labeling(&labeled, &p).unwrap().verdict.holds);
        }
    }
}

#[test]
fn zero_round_witness_runs_on_symmetric_trees() {
    let problems = [
        parse_problem("delta: 3\nnodes:\nX^3\nedges:\nX X").unwrap(),
        parse_problem("delta: 4\nnodes:\nA^2 [B C]^2\nM^4\nedges:\nA A\nC C\nM B").unwrap(),
    ];
    for p in &problems {
        let v = zero_round_solvable_symmetric(p);
        assert!(v.holds);
        let Some(Witness::Config(c)) = v.witness else {
            panic!("a passing verdict carries the configuration");
        };
        let out_labels = c.plain_labels();
        for seed in 0..10 {
            let mut t = random_tree(40, p.delta(), seed, true).unwrap();
            for e in 0..t.edges().len() {
                let edge = t.edge(e).clone();
                let lab = out_labels[edge.port_u - 1].clone();
                t.set_label(edge.u, e, lab.clone());
                t.set_label(edge.v, e, lab);
            }
            assert!(check_labeling(&t, p).unwrap().verdict.holds);
        }
    }
}

#[test]
fn plus_without_c_is_a_family_problem() {
    for (d, a, x) in [(4, 3, 0), (5, 4, 1), (6, 6, 2)] {
        let plus = make_plus_problem(FamilyParams::new(d, a, x).unwrap()).unwrap();
        let c = l("C");
        let strip = |k: &Constraint| {
            let configs: Vec<CondensedConfig> = k
                .configs()
                .iter()
                .filter(|cfg| !cfg.items().iter().any(|(g, _)| g.members() == [c.clone()]))
                .map(|cfg| {
                    CondensedConfig::new(cfg.items().iter().map(|(g, m)| {
                        (Group::new(g.members().iter().filter(|y| **y != c).cloned()).unwrap(), *m)
                    }))
                })
                .collect();
            Constraint::new(k.arity(), configs).unwrap()
        };
        let stripped = Problem::new(d, strip(plus.node_constraint()), strip(plus.edge_constraint())).unwrap();
        let family = make_family_problem(FamilyParams::new(d, a - x - 1, x + 1).unwrap());
        assert!(problems_isomorphic(&stripped, &family).is_some(), "({d},{a},{x})");
    }
}

#[test]
fn hand_built_one_outdegree_set() {
    // A spider: center 0 with arms 0-1-2-3, 0-4-5-6, 0-7-8, 0-9.
    let pairs = [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6), (0, 7), (7, 8), (0, 9)];
    let mut next_port = [1usize; 10];
    let edges: Vec<(usize, usize, usize, usize)> = pairs
        .iter()
        .map(|&(u, v)| {
            let (pu, pv) = (next_port[u], next_port[v]);
            next_port[u] += 1;
            next_port[v] += 1;
            (u, v, pu, pv)
        })
        .collect();
    let t = LabeledTree::new(10, 4, &edges).unwrap();
    let stmt = kods_problem_statement(4, 1).unwrap();
    assert!(!stmt.is_mis && !stmt.is_trivial);
    let mut in_set = vec![false; 10];
    for w in [0, 1, 3, 4, 5, 8] {
        in_set[w] = true;
    }
    // Edges inside S: 0-1 (e0), 0-4 (e3), 4-5 (e4); each tail has one outgoing edge.
    let sol = DSolution {
        in_set,
        orientation: BTreeMap::from([(0, 0), (3, 4), (4, 5)]),
    };
    assert!(check_kods(&t, &sol, 1).holds, "{}", check_kods(&t, &sol, 1).narrative);
    let mut bad = sol.clone();
    bad.orientation.insert(3, 0);
    assert!(!check_kods(&t, &bad, 1).holds);
}

#[test]
fn weakening_is_monotone() {
    for seed in 0..8 {
        let t = random_tree(50, 4, seed, false).unwrap();
        for a1 in 0..=4 {
            for x1 in 0..=4 {
                let from = FamilyParams::new(4, a1, x1).unwrap();
                let Some(input) = generate_valid_labeling(&t, &make_family_problem(from), seed) else {
                    continue;
                };
                for a in 0..=a1 {
                    for x in x1..=4 {
                        let to = FamilyParams::new(4, a, x).unwrap();
                        let out = weaken_labeling(&input, from, to).unwrap();
                        assert!(check_labeling(&out, &make_family_problem(to)).unwrap().verdict.holds);
                    }
                }
            }
        }
    }
}
