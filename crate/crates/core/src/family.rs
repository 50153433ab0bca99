//! The problem family `Pi(a, x)`, its companion `Pi+(a, x)`, MIS, and the
//! lower-bound sequences built from them.
//!
//! Labels of `Pi(a, x)`: `M` (in the set, at most `x` outgoing edges marked
//! `X`), `P`/`O` (pointer to a dominating neighbor, other edges), `A` (owns
//! `a` edges) and `X` (wildcard).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::analysis::{verify_speedup_target, zero_round_solvable_symmetric, AnalysisError, Verdict};
use crate::engine::{EngineError, Options};
use crate::label_set::{LabelSet, SetLabel};
use crate::problem::{labels, CondensedConfig, Constraint, Group, Label, Problem};
use crate::rename::{problems_isomorphic, rename_problem, RenamingMap};
use crate::round_elim::{re, LiftedProblem, Transform};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("parameter out of range: {0}")]
    OutOfRange(&'static str),
    #[error("precondition {inequality} fails for {params}")]
    Precondition {
        inequality: &'static str,
        params: FamilyParams,
    },
    #[error("sequence step {index}: {inequality} fails ({detail})")]
    Sequence {
        index: usize,
        inequality: &'static str,
        detail: String,
    },
    #[error("sequence is empty (t = 0), no lower bound follows")]
    EmptySequence,
    #[error("final problem {0} is zero-round solvable")]
    FinalSolvable(FamilyParams),
    #[error("re of {0} is not isomorphic to the expected problem")]
    NotIsomorphic(FamilyParams),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilyParams {
    pub delta: usize,
    pub a: usize,
    pub x: usize,
}

impl FamilyParams {
    pub fn new(delta: usize, a: usize, x: usize) -> Result<Self, FamilyError> {
        if delta < 2 {
            return Err(FamilyError::OutOfRange("delta >= 2"));
        }
        if a > delta {
            return Err(FamilyError::OutOfRange("a <= delta"));
        }
        if x > delta {
            return Err(FamilyError::OutOfRange("x <= delta"));
        }
        Ok(FamilyParams { delta, a, x })
    }

    /// With `a = 0` the `A` configuration is all `X` and the problem becomes
    /// zero-round solvable.
    pub fn is_degenerate(&self) -> bool {
        self.a == 0
    }

    fn require(&self, ok: bool, inequality: &'static str) -> Result<(), FamilyError> {
        if ok {
            Ok(())
        } else {
            Err(FamilyError::Precondition {
                inequality,
                params: *self,
            })
        }
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(delta={}, a={}, x={})", self.delta, self.a, self.x)
    }
}

/// Builds a configuration from `(group members, multiplicity)` pairs,
/// skipping zero multiplicities.
fn config(items: &[(&str, usize)]) -> CondensedConfig {
    CondensedConfig::new(
        items
            .iter()
            .map(|(g, m)| (Group::new(labels(g)).expect("nonempty"), *m)),
    )
}

fn problem(delta: usize, node: Vec<CondensedConfig>, edge: Vec<CondensedConfig>, note: String) -> Problem {
    Problem::new(
        delta,
        Constraint::new(delta, node).expect("node arity"),
        Constraint::new(2, edge).expect("edge arity"),
    )
    .expect("valid problem")
    .with_note(note)
}

pub fn make_family_problem(params: FamilyParams) -> Problem {
    let FamilyParams { delta: d, a, x } = params;
    problem(
        d,
        alloc::vec![
            config(&[("M", d - x), ("X", x)]),
            config(&[("A", a), ("X", d - a)]),
            config(&[("P", 1), ("O", d - 1)]),
        ],
        alloc::vec![
            config(&[("M", 1), ("P A O X", 1)]),
            config(&[("O", 1), ("M A O X", 1)]),
            config(&[("P", 1), ("M X", 1)]),
            config(&[("A", 1), ("M O X", 1)]),
            config(&[("X", 1), ("M P A O X", 1)]),
        ],
        format!("family{params}"),
    )
}

/// `Pi+(a, x)`: `Pi(a - x - 1, x + 1)` plus the label `C`.
pub fn make_plus_problem(params: FamilyParams) -> Result<Problem, FamilyError> {
    let FamilyParams { delta: d, a, x } = params;
    params.require(x < d, "x+1 <= delta")?;
    params.require(a > x, "a-x-1 >= 0")?;
    Ok(problem(
        d,
        alloc::vec![
            config(&[("M", d - x - 1), ("X", x + 1)]),
            config(&[("P", 1), ("O", d - 1)]),
            config(&[("A", a - x - 1), ("X", d - a + x + 1)]),
            config(&[("C", d - x), ("X", x)]),
        ],
        alloc::vec![
            config(&[("M", 1), ("P A C O X", 1)]),
            config(&[("O", 1), ("M A C O X", 1)]),
            config(&[("P", 1), ("M X", 1)]),
            config(&[("A", 1), ("M C O X", 1)]),
            config(&[("X", 1), ("M P A C O X", 1)]),
            config(&[("C", 1), ("M A O X", 1)]),
        ],
        format!("plus{params}"),
    ))
}

pub fn make_mis_problem(delta: usize) -> Result<Problem, FamilyError> {
    if delta < 2 {
        return Err(FamilyError::OutOfRange("delta >= 2"));
    }
    Ok(problem(
        delta,
        alloc::vec![config(&[("M", delta)]), config(&[("P", 1), ("O", delta - 1)])],
        alloc::vec![config(&[("M", 1), ("P O", 1)]), config(&[("O", 2)])],
        format!("mis(delta={delta})"),
    ))
}

/// Names for the eight right-closed sets of the family's edge diagram:
/// `(name, set of family labels)`.
pub fn re_dictionary() -> Vec<(Label, SetLabel)> {
    [
        ("X", "X"),
        ("M", "M X"),
        ("O", "O X"),
        ("U", "M O X"),
        ("A", "A O X"),
        ("B", "M A O X"),
        ("P", "P A O X"),
        ("Q", "M P A O X"),
    ]
    .iter()
    .map(|(n, s)| (Label::new(n).expect("label"), LabelSet::new(labels(s))))
    .collect()
}

/// The closed form of `re(Pi(a, x))` over the names of [`re_dictionary`].
pub fn expected_re_problem(params: FamilyParams) -> Result<Problem, FamilyError> {
    let FamilyParams { delta: d, a, x } = params;
    params.require(x + 2 <= a, "x+2 <= a")?;
    let all = "X M O U A B P Q";
    Ok(problem(
        d,
        alloc::vec![
            config(&[("M U B Q", d - x), (all, x)]),
            config(&[("P Q", 1), ("O U A B P Q", d - 1)]),
            config(&[("A B P Q", a), (all, d - a)]),
        ],
        alloc::vec![
            config(&[("X", 1), ("Q", 1)]),
            config(&[("O", 1), ("B", 1)]),
            config(&[("A", 1), ("U", 1)]),
            config(&[("P", 1), ("M", 1)]),
        ],
        format!("expected re of family{params}"),
    ))
}

/// The relaxation target for `rere(re(Pi(a, x)))`: the labels of `Pi+(a, x)`
/// standing for sets of the names of [`re_dictionary`].
pub fn relaxation_target(params: FamilyParams) -> Result<LiftedProblem, FamilyError> {
    params.require(params.x + 2 <= params.a, "x+2 <= a")?;
    let problem = make_plus_problem(params)?;
    let mut dictionary: Vec<(Label, SetLabel)> = [
        ("M", "M U B Q"),
        ("X", "X M O U A B P Q"),
        ("P", "P Q"),
        ("O", "O U A B P Q"),
        ("A", "A B P Q"),
        ("C", "U B P Q"),
    ]
    .iter()
    .map(|(n, s)| (Label::new(n).expect("label"), LabelSet::new(labels(s))))
    .collect();
    dictionary.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(LiftedProblem {
        problem,
        dictionary,
        transform: Transform::Rere,
        source_note: format!("expected re of family{params}"),
    })
}

/// One application of the speedup: `(a, x) -> (floor((a-2x-1)/2), x+1)`.
pub fn step_params(params: FamilyParams) -> Result<FamilyParams, FamilyError> {
    let FamilyParams { delta, a, x } = params;
    params.require(2 * x < a, "2x+1 <= a")?;
    params.require(x + 2 <= a, "x+2 <= a")?;
    params.require(a <= delta, "a <= delta")?;
    FamilyParams::new(delta, (a - 2 * x - 1) / 2, x + 1)
}

/// Report for the transition from `Pi_i` to `Pi_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceStep {
    pub index: usize,
    pub params: FamilyParams,
    /// The problem one speedup step yields.
    pub stepped: FamilyParams,
    /// The next problem of the sequence, no harder than `stepped`.
    pub next: FamilyParams,
    /// `x < a/8`, the margin the sequence's arithmetic relies on.
    pub margin: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceCertificate {
    pub delta: usize,
    pub x0: usize,
    pub epsilon: f64,
    pub t: usize,
    pub steps: Vec<SequenceStep>,
    pub final_params: FamilyParams,
    pub final_verdict: Verdict,
    /// Whether `x0 <= delta^epsilon`.
    pub x0_within_guidance: bool,
    pub statement: String,
}

/// `floor(epsilon * log2(delta))`.
pub fn sequence_length(delta: usize, epsilon: f64) -> usize {
    let t = epsilon * libm::log2(delta as f64);
    if t.is_finite() && t > 0.0 {
        libm::floor(t) as usize
    } else {
        0
    }
}

/// `Pi_i = Pi(floor(delta / 2^(3i)), x0 + i)`.
pub fn sequence_params(delta: usize, x0: usize, i: usize) -> Result<FamilyParams, FamilyError> {
    let a = if 3 * i >= usize::BITS as usize { 0 } else { delta >> (3 * i) };
    FamilyParams::new(delta, a, x0 + i)
}

/// Checks the `t` transitions of the sequence: each satisfies the speedup
/// preconditions, and the stepped problem dominates the next one (at least
/// as many owned edges, at most as many outgoing edges).
pub fn sequence_transitions(delta: usize, x0: usize, t: usize) -> Result<Vec<SequenceStep>, FamilyError> {
    let mut steps = Vec::with_capacity(t);
    for i in 0..t {
        let fail = |inequality, detail: String| FamilyError::Sequence {
            index: i,
            inequality,
            detail,
        };
        let params = sequence_params(delta, x0, i).map_err(|e| fail("parameters in range", format!("{e}")))?;
        let next = sequence_params(delta, x0, i + 1).map_err(|e| fail("parameters in range", format!("{e}")))?;
        let stepped = step_params(params).map_err(|e| match e {
            FamilyError::Precondition { inequality, params } => fail(inequality, format!("{params}")),
            other => fail("parameters in range", format!("{other}")),
        })?;
        if stepped.a < next.a {
            return Err(fail("a' >= a_(i+1)", format!("{} < {}", stepped.a, next.a)));
        }
        if stepped.x > next.x {
            return Err(fail("x' <= x_(i+1)", format!("{} > {}", stepped.x, next.x)));
        }
        steps.push(SequenceStep {
            index: i,
            params,
            stepped,
            next,
            margin: 8 * params.x < params.a,
        });
    }
    Ok(steps)
}

pub fn build_sequence(delta: usize, x0: usize, epsilon: f64) -> Result<SequenceCertificate, FamilyError> {
    if delta < 2 {
        return Err(FamilyError::OutOfRange("delta >= 2"));
    }
    let t = sequence_length(delta, epsilon);
    if t == 0 {
        return Err(FamilyError::EmptySequence);
    }
    let steps = sequence_transitions(delta, x0, t)?;
    let final_params = sequence_params(delta, x0, t)?;
    let final_verdict = zero_round_solvable_symmetric(&make_family_problem(final_params));
    if final_verdict.holds {
        return Err(FamilyError::FinalSolvable(final_params));
    }
    let x0_within_guidance = (x0 as f64) <= libm::pow(delta as f64, epsilon);
    let statement = format!(
        "family(delta={delta}, a={delta}, x={x0}) needs at least {t} rounds given a {delta}-edge coloring: \
         each of the {t} steps loses one round and family{final_params} is not zero-round solvable"
    );
    Ok(SequenceCertificate {
        delta,
        x0,
        epsilon,
        t,
        steps,
        final_params,
        final_verdict,
        x0_within_guidance,
        statement,
    })
}

/// Smallest `delta` in `2..=limit` for which [`build_sequence`] succeeds.
pub fn smallest_sequence_delta(x0: usize, epsilon: f64, limit: usize) -> Option<usize> {
    (2..=limit).find(|&d| build_sequence(d, x0, epsilon).is_ok())
}

/// Engine-checked speedup step for one parameter tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanizedStep {
    pub params: FamilyParams,
    /// Engine names to the names of [`re_dictionary`].
    pub renaming: RenamingMap,
    /// `re(Pi(a, x))` under the dictionary's names.
    pub re_problem: Problem,
    /// Whether `rere` of `re_problem` relaxes to [`relaxation_target`].
    pub verdict: Verdict,
    pub stepped: FamilyParams,
}

/// Computes `re(Pi(a, x))`, matches it against [`expected_re_problem`], and
/// checks the relaxation into `Pi+(a, x)`.
pub fn mechanize_step(params: FamilyParams, opts: &Options) -> Result<MechanizedStep, FamilyError> {
    let expected = expected_re_problem(params)?;
    let target = relaxation_target(params)?;
    let stepped = step_params(params)?;
    let lifted = re(&make_family_problem(params), opts)?;
    let renaming = problems_isomorphic(&lifted.problem, &expected).ok_or(FamilyError::NotIsomorphic(params))?;
    let re_problem = rename_problem(&lifted.problem, &renaming).expect("bijection from isomorphism");
    let verdict = verify_speedup_target(&re_problem, &target, opts)?;
    Ok(MechanizedStep {
        params,
        renaming,
        re_problem,
        verdict,
        stepped,
    })
}

/// [`sequence_transitions`] with every transition also checked by
/// [`mechanize_step`]. Only feasible at small `delta`.
pub fn mechanize_transitions(
    delta: usize,
    x0: usize,
    t: usize,
    opts: &Options,
) -> Result<Vec<(SequenceStep, MechanizedStep)>, FamilyError> {
    sequence_transitions(delta, x0, t)?
        .into_iter()
        .map(|s| Ok((s.clone(), mechanize_step(s.params, opts)?)))
        .collect()
}

/// The k-outdegree dominating set problem: `S` dominates and each node of
/// `S` has at most `k` outgoing edges inside `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KodsStatement {
    pub delta: usize,
    pub k: usize,
    /// `k = 0`: the orientation is empty and `S` is an MIS.
    pub is_mis: bool,
    /// `k = delta`: every node in `S` with any orientation works.
    pub is_trivial: bool,
    pub text: String,
}

pub fn kods_problem_statement(delta: usize, k: usize) -> Result<KodsStatement, FamilyError> {
    if k > delta {
        return Err(FamilyError::OutOfRange("k <= delta"));
    }
    let mut text = format!(
        "{k}-outdegree dominating set on trees of maximum degree {delta}: S is dominating and \
         edges inside S are oriented with outdegree at most {k}"
    );
    if k == 0 {
        text.push_str("; equivalent to maximal independent set");
    }
    if k == delta {
        text.push_str("; trivial (S = V)");
    }
    Ok(KodsStatement {
        delta,
        k,
        is_mis: k == 0,
        is_trivial: k == delta,
        text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::serialize_problem;

    fn params(d: usize, a: usize, x: usize) -> FamilyParams {
        FamilyParams::new(d, a, x).unwrap()
    }

    #[test]
    fn family_listing() {
        let p = make_family_problem(params(4, 2, 1));
        assert_eq!(
            serialize_problem(&p),
            "delta: 4\nnodes:\nA^2 X^2\nM^3 X\nO^3 P\nedges:\nA [M O X]\nM [A O P X]\nO [A M O X]\nP [M X]\nX [A M O P X]\n"
        );
    }

    #[test]
    fn zero_exponents_drop() {
        let p = make_family_problem(params(3, 3, 0));
        let nodes: Vec<String> = p.node_constraint().configs().iter().map(|c| format!("{c}")).collect();
        assert_eq!(nodes, ["A^3", "M^3", "O^2 P"]);
        assert!(params(3, 0, 0).is_degenerate());
        assert!(FamilyParams::new(3, 4, 0).is_err());
    }

    #[test]
    fn plus_listing() {
        let p = make_plus_problem(params(4, 3, 0)).unwrap();
        let nodes: Vec<String> = p.node_constraint().configs().iter().map(|c| format!("{c}")).collect();
        assert_eq!(nodes, ["A^2 X^2", "C^4", "M^3 X", "O^3 P"]);
        let cc = CondensedConfig::plain(labels("C C"));
        assert!(!crate::expand::config_in_constraint(&cc, p.edge_constraint()));
        assert!(make_plus_problem(params(4, 0, 0)).is_err());
    }

    #[test]
    fn mis_listing() {
        let p = make_mis_problem(3).unwrap();
        assert_eq!(serialize_problem(&p), "delta: 3\nnodes:\nM^3\nO^2 P\nedges:\nM [O P]\nO^2\n");
        assert!(make_mis_problem(2).is_ok());
    }

    #[test]
    fn expected_re_has_four_edges() {
        let p = expected_re_problem(params(5, 4, 1)).unwrap();
        assert_eq!(p.edge_constraint().len(), 4);
        assert_eq!(p.alphabet().len(), 8);
        assert!(matches!(
            expected_re_problem(params(5, 2, 1)),
            Err(FamilyError::Precondition { inequality: "x+2 <= a", .. })
        ));
    }

    #[test]
    fn step_arithmetic() {
        assert_eq!(step_params(params(16, 9, 1)).unwrap(), params(16, 3, 2));
        assert_eq!(step_params(params(64, 64, 0)).unwrap(), params(64, 31, 1));
        assert!(matches!(
            step_params(params(16, 4, 2)),
            Err(FamilyError::Precondition { inequality: "2x+1 <= a", .. })
        ));
    }

    #[test]
    fn sequence_small_epsilon() {
        let c = build_sequence(4096, 2, 0.1).unwrap();
        assert_eq!(c.t, 1);
        assert_eq!(c.steps.len(), 1);
        assert_eq!(c.final_params, params(4096, 512, 3));
        assert!(!c.final_verdict.holds);
    }

    #[test]
    fn sequence_large_delta() {
        let c = build_sequence(1 << 20, 2, 0.25).unwrap();
        assert_eq!(c.t, 5);
        assert!(c.steps.iter().all(|s| s.margin));
        assert_eq!(c.final_params, params(1 << 20, 32, 7));
    }

    #[test]
    fn sequence_refusals() {
        assert_eq!(build_sequence(1 << 20, 2, 0.0), Err(FamilyError::EmptySequence));
        assert_eq!(
            build_sequence(5, 0, 0.5),
            Err(FamilyError::FinalSolvable(params(5, 0, 1)))
        );
        assert!(matches!(
            build_sequence(64, 2, 1.0),
            Err(FamilyError::Sequence { index: 1, .. })
        ));
    }

    #[test]
    fn mechanized_delta_five_transition() {
        let steps = mechanize_transitions(5, 0, 1, &Options::default()).unwrap();
        assert_eq!(steps.len(), 1);
        let (s, m) = &steps[0];
        assert_eq!(s.params, params(5, 5, 0));
        assert_eq!(m.stepped, params(5, 2, 1));
        assert!(m.verdict.holds, "{}", m.verdict.narrative);
        assert!(m.stepped.a >= s.next.a);
    }

    #[test]
    fn kods_flags() {
        assert!(kods_problem_statement(4, 0).unwrap().is_mis);
        assert!(kods_problem_statement(4, 4).unwrap().is_trivial);
        assert!(kods_problem_statement(4, 5).is_err());
    }
}
