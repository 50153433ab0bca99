//! The `verify-paper` suite: every lower-bound ingredient the engine can
//! check mechanically, scaled by a maximum degree.

use std::fmt::Write;
use std::time::Instant;

use roundelim_core::analysis::{
    randomized_failure_bound, verify_speedup_target, zero_round_solvable_symmetric, Witness,
};
use roundelim_core::family::{
    build_sequence, expected_re_problem, make_family_problem, make_mis_problem, make_plus_problem,
    mechanize_transitions, re_dictionary, relaxation_target, FamilyParams,
};
use roundelim_core::simulator::{
    check_labeling, generate_valid_labeling, greedy_kods, kods_to_family_labeling,
    plus_to_family_transform, proper_edge_coloring, random_tree, weaken_labeling, LabeledTree,
};
use roundelim_core::{
    build_diagram, labels, parse_problem, problems_isomorphic, re, rename_problem, right_closed_sets,
    serialize_problem, Constraint, Label, LabelSet, LiftedProblem, Options, Problem, Side,
};
use serde::Serialize;

use crate::ops::{self, EngineReq, LimitsJson, ProblemInput, SideReq};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub criterion: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Cases checked.
    pub cases: usize,
    pub detail: String,
    pub millis: u128,
}

type Outcome = (bool, usize, String);

fn timed(criterion: u8, name: &'static str, f: impl FnOnce() -> Outcome) -> Row {
    let start = Instant::now();
    let (passed, cases, detail) = f();
    Row {
        criterion,
        name,
        passed,
        cases,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

fn params(d: usize, a: usize, x: usize) -> FamilyParams {
    FamilyParams::new(d, a, x).expect("in range")
}

/// `(a, x)` with `x + 2 <= a <= d`.
fn speedup_params(d: usize) -> impl Iterator<Item = FamilyParams> {
    (0..=d.saturating_sub(2)).flat_map(move |x| (x + 2..=d).map(move |a| params(d, a, x)))
}

/// Small problems used to cross-check `re` against the unpruned search.
pub fn corpus(delta_max: usize) -> Vec<Problem> {
    let mut out = Vec::new();
    for d in 3..=delta_max.min(4) {
        out.push(make_mis_problem(d).expect("mis"));
    }
    if delta_max >= 4 {
        out.extend(speedup_params(4).map(make_family_problem));
    }
    let texts = [
        "delta: 3\nnodes:\nX^3\nedges:\nX X",
        "delta: 2\nnodes:\nA^2\nB^2\nedges:\nA B",
        "delta: 3\nnodes:\nA^3\nB^3\nC^3\nedges:\nA [B C]\nB C",
        "delta: 3\nnodes:\nO I^2\nedges:\nO I",
        "delta: 3\nnodes:\nM O^2\nP^3\nedges:\nM M\nO [O P]",
        "delta: 3\nnodes:\nA [B C]^2\nD E^2\nedges:\nA [D E]\nB B\nC [D E]\nE E",
    ];
    out.extend(texts.iter().map(|t| parse_problem(t).expect("corpus problem")));
    out
}

fn criterion_1(delta_max: usize) -> Outcome {
    let opts = Options {
        verify_brute_force: true,
        ..Options::default()
    };
    let problems = corpus(delta_max);
    for p in &problems {
        if let Err(e) = re(p, &opts) {
            return (false, problems.len(), format!("{}: {e}", p.note));
        }
    }
    (true, problems.len(), "pruned and unpruned maximal searches agree".into())
}

fn criterion_2(delta_max: usize) -> Outcome {
    if delta_max < 4 {
        return (true, 0, "needs delta 4; skipped".into());
    }
    let expected_sets: Vec<LabelSet> = re_dictionary().into_iter().map(|(_, s)| s).collect();
    let mut cases = 0;
    for d in 4..=delta_max.min(6) {
        for p in speedup_params(d) {
            cases += 1;
            let source = make_family_problem(p);
            let r = match re(&source, &Options::default()) {
                Ok(r) => r,
                Err(e) => return (false, cases, format!("{p}: {e}")),
            };
            if problems_isomorphic(&r.problem, &expected_re_problem(p).expect("x+2 <= a")).is_none() {
                return (false, cases, format!("{p}: not isomorphic to the closed form"));
            }
            if r.problem.edge_constraint().len() != 4 {
                return (false, cases, format!("{p}: {} edge configurations", r.problem.edge_constraint().len()));
            }
            let mut sets = right_closed_sets(&build_diagram(&source, Side::Edge).expect("diagram"));
            sets.sort();
            let mut want = expected_sets.clone();
            want.sort();
            if sets != want {
                return (false, cases, format!("{p}: right-closed sets differ"));
            }
        }
    }
    (true, cases, "closed form, 4 edge configurations, 8 right-closed sets".into())
}

/// The target with node line `i` removed.
pub fn without_node_line(t: &LiftedProblem, i: usize) -> LiftedProblem {
    let node = t.problem.node_constraint();
    let kept = node.configs().iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| c.clone());
    let node = Constraint::new(node.arity(), kept).expect("arity");
    let problem = Problem::new(t.problem.delta(), node, t.problem.edge_constraint().clone()).expect("problem");
    let dictionary = t
        .dictionary
        .iter()
        .filter(|(n, _)| problem.alphabet().contains(n))
        .cloned()
        .collect();
    LiftedProblem {
        problem,
        dictionary,
        ..t.clone()
    }
}

/// `re(Pi(a, x))` under the names of the relaxation target.
pub fn renamed_re(p: FamilyParams) -> Problem {
    let r = re(&make_family_problem(p), &Options::default()).expect("re");
    let m = problems_isomorphic(&r.problem, &expected_re_problem(p).expect("x+2 <= a")).expect("isomorphic");
    rename_problem(&r.problem, &m).expect("bijection")
}

fn criterion_3(delta_max: usize) -> Outcome {
    if delta_max < 4 {
        return (true, 0, "needs delta 4; skipped".into());
    }
    let opts = Options::default();
    let mut cases = 0;
    let mut surviving = Vec::new();
    for d in 4..=delta_max.min(5) {
        for p in speedup_params(d) {
            cases += 1;
            let source = renamed_re(p);
            let target = relaxation_target(p).expect("x+2 <= a");
            let v = verify_speedup_target(&source, &target, &opts).expect("verdict");
            if !v.holds {
                return (false, cases, format!("{p}: {}", v.narrative));
            }
            for i in 0..target.problem.node_constraint().len() {
                let cut = without_node_line(&target, i);
                let v = verify_speedup_target(&source, &cut, &opts).expect("verdict");
                if v.holds || v.witness.is_none() {
                    surviving.push(format!("{p} without `{}`", target.problem.node_constraint().configs()[i]));
                }
            }
        }
    }
    if surviving.is_empty() {
        (true, cases, "every target holds; every line deletion fails with a witness".into())
    } else {
        (
            false,
            cases,
            format!(
                "every target holds, but {} deletions still verify: {}",
                surviving.len(),
                surviving.join("; ")
            ),
        )
    }
}

fn criterion_4(delta_max: usize) -> Outcome {
    let mut cases = 0;
    let apm = labels("A M P");
    for d in 2..=delta_max.min(8) {
        for a in 1..d {
            for x in 1..d {
                cases += 1;
                let v = zero_round_solvable_symmetric(&make_family_problem(params(d, a, x)));
                let ok = match &v.witness {
                    Some(Witness::Labels(ls)) => {
                        let mut ls = ls.clone();
                        ls.sort();
                        ls == apm
                    }
                    _ => false,
                };
                if v.holds || !ok {
                    return (false, cases, format!("{}: {}", params(d, a, x), v.narrative));
                }
            }
        }
    }
    let control = parse_problem("delta: 3\nnodes:\nX^3\nedges:\nX X").expect("control");
    if !zero_round_solvable_symmetric(&control).holds {
        return (false, cases, "single-label control is not solvable".into());
    }
    (true, cases + 1, "unsolvable with witnesses {A, M, P}; control solvable".into())
}

fn criterion_5() -> Outcome {
    let mut cases = 0;
    for d in 2..=64usize {
        for a in 1..=d {
            for x in 0..d {
                cases += 1;
                let b = randomized_failure_bound(&make_family_problem(params(d, a, x))).expect("bound");
                let want = 9 * (d as u128) * (d as u128);
                if b.denominator != want || !b.meets_threshold {
                    return (false, cases, format!("{}: 1/{}", params(d, a, x), b.denominator));
                }
            }
        }
    }
    (true, cases, "1/(3 delta)^2 >= 1/delta^8".into())
}

fn valid(t: &LabeledTree, p: &Problem) -> bool {
    check_labeling(t, p).map(|r| r.verdict.holds).unwrap_or(false)
}

fn has_a_a_edge(t: &LabeledTree) -> bool {
    t.edges().iter().any(|e| e.labels.iter().all(|l| l.as_ref().map(Label::as_str) == Some("A")))
}

/// Runs every transform on one seeded tree; `Err` names the first failure.
pub fn transforms_on_tree(seed: u64) -> Result<(), String> {
    const D: usize = 4;
    let n = 2 + (seed as usize * 37) % 299;
    let tree = random_tree(n, D, seed, false).map_err(|e| e.to_string())?;
    let colored = proper_edge_coloring(&tree).map_err(|e| e.to_string())?;
    for k in 0..=2 {
        let sol = greedy_kods(&tree, k);
        for a in 0..=D {
            let l = kods_to_family_labeling(&tree, &sol, a, k).map_err(|e| format!("kods k={k} a={a}: {e}"))?;
            if !valid(&l, &make_family_problem(params(D, a, k))) {
                return Err(format!("kods k={k} a={a}: labeling rejected"));
            }
        }
    }
    for x in 0..=1 {
        for a in 2 * x + 1..=D {
            let plus = make_plus_problem(params(D, a, x)).map_err(|e| e.to_string())?;
            let input = generate_valid_labeling(&colored, &plus, seed)
                .ok_or_else(|| format!("plus a={a} x={x}: no labeling"))?;
            let out = plus_to_family_transform(&input, a, x).map_err(|e| format!("plus a={a} x={x}: {e}"))?;
            if !valid(&out, &make_family_problem(params(D, (a - 2 * x - 1) / 2, x + 1))) || has_a_a_edge(&out) {
                return Err(format!("plus a={a} x={x}: output rejected"));
            }
        }
    }
    for x in 0..=D {
        let sol = greedy_kods(&tree, x);
        for a in 0..=D {
            let from = params(D, a, x);
            let l = kods_to_family_labeling(&tree, &sol, a, x).map_err(|e| e.to_string())?;
            for a2 in 0..=a {
                for x2 in x..=D {
                    let to = params(D, a2, x2);
                    let w = weaken_labeling(&l, from, to).map_err(|e| format!("weaken {from} -> {to}: {e}"))?;
                    if !valid(&w, &make_family_problem(to)) {
                        return Err(format!("weaken {from} -> {to}: labeling rejected"));
                    }
                }
            }
        }
    }
    Ok(())
}

fn criterion_6(delta_max: usize) -> Outcome {
    if delta_max < 4 {
        return (true, 0, "needs delta 4; skipped".into());
    }
    for seed in 0..100 {
        if let Err(e) = transforms_on_tree(seed) {
            return (false, seed as usize + 1, format!("seed {seed}: {e}"));
        }
    }
    (true, 100, "100/100 trees".into())
}

fn criterion_7(delta_max: usize) -> Outcome {
    let c = match build_sequence(1 << 20, 2, 0.25) {
        Ok(c) => c,
        Err(e) => return (false, 1, format!("delta 2^20: {e}")),
    };
    let steps_ok = c.t == 5
        && c.steps.iter().all(|s| {
            let p = s.params;
            2 * p.x < p.a && p.x + 2 <= p.a && p.a <= p.delta && s.margin
        })
        && !c.final_verdict.holds;
    if !steps_ok {
        return (false, 1, format!("delta 2^20: t={} or a step inequality fails", c.t));
    }
    if delta_max < 5 {
        return (true, 1, "delta 2^20 certificate with 5 steps".into());
    }
    let mut detail = "delta 2^20 certificate with 5 steps".to_string();
    let transitions = mechanize_transitions(5, 0, 1, &Options::default());
    match &transitions {
        Ok(ts) if ts.iter().all(|(_, m)| m.verdict.holds) => {
            write!(detail, "; delta 5 transition {} -> {} mechanized", ts[0].0.params, ts[0].1.stepped).unwrap();
        }
        Ok(_) => return (false, 2, "delta 5 transition does not verify".into()),
        Err(e) => return (false, 2, format!("delta 5 transition: {e}")),
    }
    let refusals: Vec<String> = [0.05, 0.25, 0.5, 1.0]
        .iter()
        .filter_map(|&eps| build_sequence(5, 0, eps).err().map(|e| format!("epsilon {eps}: {e}")))
        .collect();
    if refusals.len() == 4 {
        write!(detail, "; no delta 5 certificate exists ({})", refusals.join("; ")).unwrap();
        (false, 2, detail)
    } else {
        (true, 2, detail)
    }
}

fn criterion_8() -> Outcome {
    let mis = ProblemInput::Text(serialize_problem(&make_mis_problem(3).expect("mis")));
    let family = ProblemInput::Text(serialize_problem(&make_family_problem(params(4, 3, 1))));
    let run = || -> Vec<String> {
        let req = |p: &ProblemInput| EngineReq {
            problem: p.clone(),
            limits: LimitsJson::default(),
            rename: Default::default(),
        };
        let side = |p: &ProblemInput| SideReq {
            problem: p.clone(),
            side: "edge".into(),
        };
        [
            ops::run_re(&req(&mis), None),
            ops::run_rere(&req(&mis), None),
            ops::run_re(&req(&family), None),
            ops::diagram(&side(&family)),
            ops::right_closed(&side(&family)),
            ops::zero_round(&family),
        ]
        .into_iter()
        .map(|o| o.map(|o| o.json_text()).unwrap_or_else(|e| e.to_string()))
        .collect()
    };
    let first = run();
    let mut runs = vec![run(), run()];
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..3).map(|_| s.spawn(run)).collect();
        runs.extend(handles.into_iter().map(|h| h.join().expect("thread")));
    });
    let same = runs.iter().all(|r| *r == first);
    (same, first.len() * 6, "3 sequential and 3 parallel runs".into())
}

/// Runs the suite. Criteria that need a larger degree than `delta_max`
/// shrink to the degrees available.
pub fn run_suite(delta_max: usize) -> Vec<Row> {
    vec![
        timed(1, "re matches unpruned search", || criterion_1(delta_max)),
        timed(2, "re of the family in closed form", || criterion_2(delta_max)),
        timed(3, "speedup relaxation", || criterion_3(delta_max)),
        timed(4, "zero-round impossibility", || criterion_4(delta_max)),
        timed(5, "randomized failure bound", criterion_5),
        timed(6, "executable transforms", || criterion_6(delta_max)),
        timed(7, "sequence certificates", || criterion_7(delta_max)),
        timed(8, "determinism", criterion_8),
    ]
}

pub fn table(rows: &[Row]) -> String {
    let mut out = String::new();
    for r in rows {
        writeln!(
            out,
            "{} {} {:<34} {:>6} cases {:>8} ms  {}",
            r.criterion,
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.cases,
            r.millis,
            r.detail
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite() {
        let rows = run_suite(3);
        assert_eq!(rows.len(), 8);
        for r in &rows {
            assert!(r.passed, "{}", table(&rows));
        }
    }

    #[test]
    fn deleting_a_line_can_leave_a_valid_target() {
        let p = params(4, 2, 0);
        let t = relaxation_target(p).unwrap();
        let source = renamed_re(p);
        let pline = t
            .problem
            .node_constraint()
            .configs()
            .iter()
            .position(|c| c.labels().any(|l| l.as_str() == "P"))
            .unwrap();
        let v = verify_speedup_target(&source, &without_node_line(&t, pline), &Options::default()).unwrap();
        assert!(v.holds);
    }
}
