//! Relaxations, speedup targets, zero-round solvability on the symmetric
//! port family, the randomized failure bound and subsumption cleanup.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::engine::{EngineError, Options};
use crate::expand::{config_in_constraint, expand_config};
use crate::matching::exact_cover;
use crate::problem::{CondensedConfig, Constraint, Label, Problem};
use crate::round_elim::{lift_exists_constraint, maximal_set_configs, LiftedProblem, SetConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("configuration `{0}` has no self-incompatible label; the bound is not derivable")]
    NoSelfIncompatibleLabel(CondensedConfig),
    #[error("target label `{0}` has no set in the dictionary")]
    MissingSet(Label),
    #[error("target node configuration `{0}` uses disjunctions")]
    CondensedTarget(CondensedConfig),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// `from` relaxes to `to`: slot `i` of `from` (multiplicities unrolled) is a
/// subset of slot `witness[i]` of `to`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relaxation {
    pub from: SetConfig,
    pub to: SetConfig,
    pub witness: Vec<usize>,
}

/// Finds a slot permutation under which every slot of `c1` is contained in
/// the matched slot of `c2`.
pub fn relaxes_to(c1: &SetConfig, c2: &SetConfig) -> Result<Option<Relaxation>, AnalysisError> {
    if c1.arity() != c2.arity() {
        return Err(AnalysisError::ArityMismatch(c1.arity(), c2.arity()));
    }
    let left: Vec<usize> = c1.slots().iter().map(|(_, m)| *m).collect();
    let right: Vec<usize> = c2.slots().iter().map(|(_, m)| *m).collect();
    let Some(mut flow) = exact_cover(&left, &right, |i, j| {
        c1.slots()[i].0.is_subset(&c2.slots()[j].0)
    }) else {
        return Ok(None);
    };
    // Unrolled slot numbering: the first slot of item j is the sum of the
    // multiplicities before it.
    let mut offset = Vec::with_capacity(right.len());
    let mut next = 0;
    for m in &right {
        offset.push(next);
        next += m;
    }
    let mut used = alloc::vec![0usize; right.len()];
    let mut witness = Vec::with_capacity(c1.arity());
    for (i, m) in left.iter().enumerate() {
        for _ in 0..*m {
            let j = (0..right.len()).find(|&j| flow[i][j] > 0).expect("flow covers left");
            flow[i][j] -= 1;
            witness.push(offset[j] + used[j]);
            used[j] += 1;
        }
    }
    Ok(Some(Relaxation {
        from: c1.clone(),
        to: c2.clone(),
        witness,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A configuration of a problem.
    Config(CondensedConfig),
    /// A set configuration that has no relaxation into the target.
    SetConfig(SetConfig),
    /// One label per node configuration, in constraint order.
    Labels(Vec<Label>),
    /// A node of a simulated tree.
    Node(usize),
    /// An edge of a simulated tree.
    Edge(usize),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Config(c) => write!(f, "{c}"),
            Witness::SetConfig(c) => write!(f, "{c}"),
            Witness::Labels(ls) => {
                for (i, l) in ls.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{l}")?;
                }
                Ok(())
            }
            Witness::Node(v) => write!(f, "node {v}"),
            Witness::Edge(e) => write!(f, "edge {e}"),
        }
    }
}

/// Outcome of a check. A failed check always carries a witness; a passing
/// one may carry an example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub narrative: String,
}

impl Verdict {
    pub fn pass(narrative: String) -> Self {
        Verdict {
            holds: true,
            witness: None,
            narrative,
        }
    }

    pub fn fail(witness: Witness, narrative: String) -> Self {
        Verdict {
            holds: false,
            witness: Some(witness),
            narrative,
        }
    }
}

/// Checks that `target` can be produced in zero rounds from a solution of
/// `rere(p)`.
///
/// Node side: every maximal node set configuration of `p` relaxes to a node
/// configuration of `target` (read through its dictionary). Edge side: for
/// every pair of target sets, if some selection is an edge of `p`, the pair
/// is an edge of `target`. Replacing sets by supersets can only add
/// selections, so this covers every edge a relaxed solution can produce.
pub fn verify_speedup_target(
    p: &Problem,
    target: &LiftedProblem,
    opts: &Options,
) -> Result<Verdict, AnalysisError> {
    let mut targets: Vec<SetConfig> = Vec::new();
    for c in target.problem.node_constraint().configs() {
        let mut slots = Vec::new();
        for (g, m) in c.items() {
            if !g.is_singleton() {
                return Err(AnalysisError::CondensedTarget(c.clone()));
            }
            let l = &g.members()[0];
            let set = target.set_of(l).ok_or_else(|| AnalysisError::MissingSet(l.clone()))?;
            slots.push((set.clone(), *m));
        }
        targets.push(SetConfig::new(slots));
    }

    let maximal = maximal_set_configs(p.node_constraint(), p.alphabet(), opts)?;
    for y in &maximal {
        let mut found = false;
        for z in &targets {
            if relaxes_to(y, z)?.is_some() {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(Verdict::fail(
                Witness::SetConfig(y.clone()),
                format!(
                    "node configuration {y} of rere has no relaxation into the {} target node configurations",
                    targets.len()
                ),
            ));
        }
    }

    let lifted = lift_exists_constraint(p.edge_constraint(), &target.dictionary);
    let target_edges = target.problem.edge_constraint();
    for c in lifted.configs() {
        for plain in expand_config(c) {
            if !config_in_constraint(&plain, target_edges) {
                return Ok(Verdict::fail(
                    Witness::Config(plain.clone()),
                    format!("edge {plain} is reachable by relaxation but not allowed by the target"),
                ));
            }
        }
    }
    Ok(Verdict::pass(format!(
        "all {} maximal node configurations relax into the target; all reachable edges are allowed",
        maximal.len()
    )))
}

/// Labels `l` with `l l` allowed on an edge.
pub fn self_compatible(p: &Problem) -> Vec<Label> {
    p.alphabet()
        .iter()
        .filter(|l| {
            config_in_constraint(
                &CondensedConfig::plain([(*l).clone(), (*l).clone()]),
                p.edge_constraint(),
            )
        })
        .cloned()
        .collect()
}

/// Zero-round solvability when every edge has the same port on both ends.
///
/// All nodes see the same view and must output the same configuration, and
/// each edge carries one label on both halves. Solvable exactly when some
/// node configuration consists of self-compatible labels. On failure the
/// witness holds, per node configuration, the smallest label of a group with
/// no self-compatible member.
pub fn zero_round_solvable_symmetric(p: &Problem) -> Verdict {
    let ok = self_compatible(p);
    let mut blockers = Vec::new();
    for c in p.node_constraint().configs() {
        let blocked = c
            .items()
            .iter()
            .find(|(g, _)| g.members().iter().all(|l| !ok.contains(l)));
        match blocked {
            Some((g, _)) => blockers.push(g.members()[0].clone()),
            None => {
                let choice = CondensedConfig::new(c.items().iter().map(|(g, m)| {
                    let l = g.members().iter().find(|l| ok.contains(l)).expect("unblocked");
                    (crate::problem::Group::single(l.clone()), *m)
                }));
                let narrative = format!("every node outputs {choice}; all its labels are self-compatible");
                return Verdict {
                    holds: true,
                    witness: Some(Witness::Config(choice)),
                    narrative,
                };
            }
        }
    }
    let narrative = format!(
        "every node configuration contains a self-incompatible label ({})",
        Witness::Labels(blockers.clone())
    );
    Verdict::fail(Witness::Labels(blockers), narrative)
}

/// Lower bound `(1/(c·delta))^2` on the failure probability of a randomized
/// zero-round algorithm, where `c` is the number of node configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FailureBound {
    pub delta: usize,
    pub configs: usize,
    /// The bound is `1 / denominator`.
    pub denominator: u128,
    /// Whether the bound is at least `1/delta^8`.
    pub meets_threshold: bool,
}

impl FailureBound {
    pub fn probability(&self) -> f64 {
        1.0 / self.denominator as f64
    }
}

/// Some configuration is used with probability at least `1/c`, some port of
/// it carries a self-incompatible label, so two neighbors collide on it with
/// probability at least `(1/(c·delta))^2`.
pub fn randomized_failure_bound(p: &Problem) -> Result<FailureBound, AnalysisError> {
    let ok = self_compatible(p);
    for c in p.node_constraint().configs() {
        if c.items().iter().all(|(g, _)| g.members().iter().any(|l| ok.contains(l))) {
            return Err(AnalysisError::NoSelfIncompatibleLabel(c.clone()));
        }
    }
    Ok(failure_bound(p.delta(), p.node_constraint().len()))
}

pub fn failure_bound(delta: usize, configs: usize) -> FailureBound {
    let cd = configs as u128 * delta as u128;
    FailureBound {
        delta,
        configs,
        denominator: cd * cd,
        meets_threshold: meets_threshold(delta, configs),
    }
}

/// `(1/(c·delta))^2 >= 1/delta^8`, i.e. `delta^6 >= c^2`.
fn meets_threshold(delta: usize, configs: usize) -> bool {
    let c2 = configs as u128 * configs as u128;
    let mut pow: u128 = 1;
    for _ in 0..6 {
        pow = pow.saturating_mul(delta as u128);
    }
    pow >= c2
}

/// Smallest `delta >= 2` at which `c` configurations meet the threshold.
pub fn threshold_delta(configs: usize) -> usize {
    (2..).find(|&d| meets_threshold(d, configs)).expect("unbounded")
}

/// Drops configurations whose expansion is covered by the remaining ones,
/// scanning in canonical order.
pub fn simplify_subsumed(k: &Constraint) -> Constraint {
    let mut kept: Vec<CondensedConfig> = k.configs().to_vec();
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<CondensedConfig> = kept
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, c)| c.clone())
            .collect();
        let rest = Constraint::new(k.arity(), others).expect("arity");
        if !rest.is_empty() && expand_config(&kept[i]).iter().all(|c| config_in_constraint(c, &rest)) {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    Constraint::new(k.arity(), kept).expect("arity")
}
