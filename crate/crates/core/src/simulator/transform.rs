//! Label rewrites turning solutions of one problem into solutions of
//! another. Each node computes its new labels from its own half-edges,
//! colors and ports in the input tree.

use alloc::vec::Vec;

use super::kods::{check_kods, DSolution};
use super::labeling::check_labeling;
use super::tree::LabeledTree;
use super::SimError;
use crate::family::{make_family_problem, make_plus_problem, FamilyParams};
use crate::problem::{Label, Problem};

type NodeRewrite = Vec<(usize, Label)>;

fn lbl(s: &str) -> Label {
    Label::new(s).expect("label")
}

/// Writes `f(t, w)` for each `w` of `order` into a copy of `t`. `f` reads
/// the input tree only.
fn apply_rewrite<F: Fn(&LabeledTree, usize) -> NodeRewrite>(t: &LabeledTree, order: &[usize], f: F) -> LabeledTree {
    let mut out = t.clone();
    for &w in order {
        for (e, l) in f(t, w) {
            out.set_label(w, e, l);
        }
    }
    out
}

fn by_tie(t: &LabeledTree, w: usize) -> Vec<usize> {
    let mut es = t.incident(w).to_vec();
    es.sort_by_key(|&e| t.tie_key(w, e));
    es
}

fn natural(t: &LabeledTree) -> Vec<usize> {
    (0..t.n()).collect()
}

fn require_valid(t: &LabeledTree, p: &Problem) -> Result<(), SimError> {
    let r = check_labeling(t, p)?;
    if r.verdict.holds {
        Ok(())
    } else {
        Err(SimError::InvalidInput(r.verdict.narrative))
    }
}

/// Replaces `from` with `to` on the first `count` matching half-edges of `es`.
fn demote(labels: &mut [(usize, Label)], from: &Label, to: &Label, count: usize) {
    for (_, l) in labels.iter_mut().filter(|(_, l)| l == from).take(count) {
        *l = to.clone();
    }
}

fn kods_rewrite(t: &LabeledTree, sol: &DSolution, k: usize, w: usize) -> NodeRewrite {
    let (m, x, p, o) = (lbl("M"), lbl("X"), lbl("P"), lbl("O"));
    let es = by_tie(t, w);
    if sol.in_set[w] {
        let mut out: NodeRewrite = es
            .iter()
            .map(|&e| (e, if sol.is_outgoing(e, w) { x.clone() } else { m.clone() }))
            .collect();
        let have = out.iter().filter(|(_, l)| *l == x).count();
        demote(&mut out, &m, &x, k.min(es.len()).saturating_sub(have));
        out
    } else {
        let pointer = es.iter().copied().find(|&e| sol.in_set[t.edge(e).other(w)]);
        es.iter()
            .map(|&e| (e, if Some(e) == pointer { p.clone() } else { o.clone() }))
            .collect()
    }
}

/// One-round algorithm from a `k`-outdegree dominating set to `Pi(a, k)`.
/// Nodes of `S` write `X` on outgoing edges and `M` elsewhere, then turn
/// `M` into `X` (lowest color and port first) until `k` edges carry `X`.
/// Other nodes write `P` toward their first neighbor in `S` and `O`
/// elsewhere.
pub fn kods_to_family_labeling(t: &LabeledTree, sol: &DSolution, a: usize, k: usize) -> Result<LabeledTree, SimError> {
    if a > t.delta || k > t.delta {
        return Err(SimError::Params("a, k <= delta"));
    }
    let v = check_kods(t, sol, k);
    if !v.holds {
        return Err(SimError::InvalidSolution(v.narrative));
    }
    Ok(apply_rewrite(t, &natural(t), |t, w| kods_rewrite(t, sol, k, w)))
}

fn plus_rewrite(t: &LabeledTree, params: FamilyParams, w: usize) -> NodeRewrite {
    let (a, c, x) = (lbl("A"), lbl("C"), lbl("X"));
    let low = (params.a - 1) / 2;
    let target = (params.a - 2 * params.x - 1) / 2;
    let mut out: NodeRewrite = by_tie(t, w)
        .into_iter()
        .map(|e| {
            let l = t.label(w, e).expect("validated").clone();
            let is_low = t.edge(e).color.expect("colored") <= low;
            let l = match () {
                _ if l == a && is_low => x.clone(),
                _ if l == c && is_low => a.clone(),
                _ if l == c => x.clone(),
                _ => l,
            };
            (e, l)
        })
        .collect();
    let have = out.iter().filter(|(_, l)| *l == a).count();
    demote(&mut out, &a, &x, have.saturating_sub(target));
    out
}

/// Zero-round rewrite from `Pi+(a, x)` to `Pi(floor((a-2x-1)/2), x+1)` using
/// the edge coloring. `A` on colors `1..=floor((a-1)/2)` becomes `X`, `C`
/// on those colors becomes `A` and other `C` becomes `X`; then each node
/// trims its `A`s, lowest color first.
pub fn plus_to_family_transform(t: &LabeledTree, a: usize, x: usize) -> Result<LabeledTree, SimError> {
    if !t.has_coloring() {
        return Err(SimError::MissingColoring);
    }
    if 2 * x + 1 > a || a > t.delta {
        return Err(SimError::Params("2x+1 <= a <= delta"));
    }
    let params = FamilyParams::new(t.delta, a, x).map_err(|_| SimError::Params("family parameters"))?;
    let plus = make_plus_problem(params).map_err(|_| SimError::Params("plus parameters"))?;
    require_valid(t, &plus)?;
    let out = apply_rewrite(t, &natural(t), |t, w| plus_rewrite(t, params, w));
    let aa = lbl("A");
    if let Some(edge) = out
        .edges()
        .iter()
        .position(|e| e.labels[0].as_ref() == Some(&aa) && e.labels[1].as_ref() == Some(&aa))
    {
        return Err(SimError::Collision { edge });
    }
    Ok(out)
}

fn weaken_rewrite(t: &LabeledTree, from: FamilyParams, to: FamilyParams, w: usize) -> NodeRewrite {
    let (m, a, x) = (lbl("M"), lbl("A"), lbl("X"));
    let mut es = t.incident(w).to_vec();
    es.sort_by_key(|&e| t.edge(e).port(w));
    let mut out: NodeRewrite = es
        .into_iter()
        .map(|e| (e, t.label(w, e).expect("validated").clone()))
        .collect();
    demote(&mut out, &m, &x, to.x - from.x);
    demote(&mut out, &a, &x, from.a - to.a);
    out
}

/// Zero-round rewrite from `Pi(a', x')` to the easier `Pi(a, x)`: each node
/// turns its surplus `M`s and `A`s into `X`, lowest port first.
pub fn weaken_labeling(t: &LabeledTree, from: FamilyParams, to: FamilyParams) -> Result<LabeledTree, SimError> {
    if from.delta != t.delta || to.delta != t.delta {
        return Err(SimError::Params("delta must match the tree"));
    }
    if to.a > from.a {
        return Err(SimError::Params("a <= a'"));
    }
    if to.x < from.x {
        return Err(SimError::Params("x >= x'"));
    }
    require_valid(t, &make_family_problem(from))?;
    Ok(apply_rewrite(t, &natural(t), |t, w| weaken_rewrite(t, from, to, w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::kods::greedy_kods;
    use crate::simulator::labeling::generate_valid_labeling;
    use crate::simulator::tree::{complete_tree, proper_edge_coloring, random_tree};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fp(d: usize, a: usize, x: usize) -> FamilyParams {
        FamilyParams::new(d, a, x).unwrap()
    }

    fn valid(t: &LabeledTree, p: &Problem) -> bool {
        check_labeling(t, p).unwrap().verdict.holds
    }

    fn colored(n: usize, seed: u64) -> LabeledTree {
        proper_edge_coloring(&random_tree(n, 4, seed, false).unwrap()).unwrap()
    }

    fn plus_input(t: &LabeledTree, a: usize, x: usize, seed: u64) -> LabeledTree {
        generate_valid_labeling(t, &make_plus_problem(fp(t.delta, a, x)).unwrap(), seed).expect("plus labeling")
    }

    #[test]
    fn kods_outputs_validate() {
        for seed in 0..20 {
            let t = colored(60, seed);
            for k in 0..=2 {
                let sol = greedy_kods(&t, k);
                for a in 0..=4 {
                    let l = kods_to_family_labeling(&t, &sol, a, k).unwrap();
                    assert!(valid(&l, &make_family_problem(fp(4, a, k))), "seed {seed} k {k} a {a}");
                }
            }
        }
    }

    #[test]
    fn kods_all_in_set_is_all_x() {
        let t = complete_tree(4, 2).unwrap();
        let sol = greedy_kods(&t, 4);
        let l = kods_to_family_labeling(&t, &sol, 2, 4).unwrap();
        assert!(l.edges().iter().all(|e| e.labels.iter().all(|x| x.as_ref().unwrap().as_str() == "X")));
    }

    #[test]
    fn kods_rejects_bad_solutions() {
        let t = complete_tree(4, 1).unwrap();
        let mut sol = greedy_kods(&t, 0);
        sol.in_set = alloc::vec![false; t.n()];
        assert!(matches!(kods_to_family_labeling(&t, &sol, 1, 0), Err(SimError::InvalidSolution(_))));
    }

    #[test]
    fn plus_transform_validates() {
        for seed in 0..10 {
            let t = colored(80, seed);
            for (a, x) in [(3, 0), (4, 0), (4, 1)] {
                let out = plus_to_family_transform(&plus_input(&t, a, x, seed), a, x).unwrap();
                let stepped = fp(4, (a - 2 * x - 1) / 2, x + 1);
                assert!(valid(&out, &make_family_problem(stepped)), "seed {seed} ({a},{x})");
            }
        }
    }

    #[test]
    fn plus_transform_without_c() {
        let t = colored(50, 3);
        let sol = greedy_kods(&t, 1);
        let input = kods_to_family_labeling(&t, &sol, 3, 1).unwrap();
        assert!(valid(&input, &make_plus_problem(fp(4, 3, 0)).unwrap()));
        let out = plus_to_family_transform(&input, 3, 0).unwrap();
        assert_eq!(out, input);
    }

    #[test]
    fn plus_transform_errors() {
        let t = random_tree(30, 4, 5, false).unwrap();
        let l = plus_input(&t, 3, 0, 1);
        assert_eq!(plus_to_family_transform(&l, 3, 0), Err(SimError::MissingColoring));
        let c = proper_edge_coloring(&l).unwrap();
        assert!(plus_to_family_transform(&c, 3, 0).is_ok());
        assert!(matches!(plus_to_family_transform(&c, 2, 1), Err(SimError::Params(_))));
        let mut broken = c.clone();
        let e = broken.incident(0)[0];
        broken.set_label(0, e, lbl("P"));
        broken.set_label(broken.edge(e).other(0), e, lbl("P"));
        assert!(matches!(plus_to_family_transform(&broken, 3, 0), Err(SimError::InvalidInput(_))));
    }

    #[test]
    fn weaken_paths() {
        let t = colored(60, 4);
        let from = fp(4, 3, 0);
        let input = generate_valid_labeling(&t, &make_family_problem(from), 2).unwrap();
        assert_eq!(weaken_labeling(&input, from, from).unwrap(), input);
        let out = weaken_labeling(&input, from, fp(4, 1, 1)).unwrap();
        assert!(valid(&out, &make_family_problem(fp(4, 1, 1))));
        assert!(matches!(weaken_labeling(&input, fp(4, 3, 1), fp(4, 1, 0)), Err(SimError::Params(_))));
    }

    #[test]
    fn rewrites_ignore_node_order() {
        let t = colored(120, 8);
        let mut order = natural(&t);
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(1));
        let sol = greedy_kods(&t, 1);
        let kods = |o: &[usize]| apply_rewrite(&t, o, |t, w| kods_rewrite(t, &sol, 1, w));
        assert_eq!(kods(&order), kods(&natural(&t)));
        let input = plus_input(&t, 4, 1, 0);
        let plus = |o: &[usize]| apply_rewrite(&input, o, |t, w| plus_rewrite(t, fp(4, 4, 1), w));
        assert_eq!(plus(&order), plus(&natural(&t)));
        let fam = generate_valid_labeling(&t, &make_family_problem(fp(4, 4, 0)), 0).unwrap();
        let weak = |o: &[usize]| apply_rewrite(&fam, o, |t, w| weaken_rewrite(t, fp(4, 4, 0), fp(4, 2, 2), w));
        assert_eq!(weak(&order), weak(&natural(&t)));
    }
}
