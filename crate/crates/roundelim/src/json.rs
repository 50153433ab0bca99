//! JSON mirrors of the engine's values.
//!
//! Configurations are lists of `[group, multiplicity]` items, groups are
//! lists of label names.

use std::collections::BTreeMap;

use roundelim_core::analysis::{FailureBound, Relaxation, Verdict, Witness};
use roundelim_core::family::{FamilyParams, MechanizedStep, SequenceCertificate, SequenceStep};
use roundelim_core::simulator::{DSolution, Edge, LabelingReport, LabeledTree};
use roundelim_core::{
    CondensedConfig, Constraint, Diagram, Group, Label, LabelSet, LiftedProblem, Problem, SetConfig,
    Side, Stats, Transform,
};
use serde::{Deserialize, Serialize};

pub type ItemJson = (Vec<String>, usize);
pub type ConfigJson = Vec<ItemJson>;

fn names(ls: &[Label]) -> Vec<String> {
    ls.iter().map(|l| l.as_str().to_string()).collect()
}

fn label(s: &str) -> Result<Label, String> {
    Label::new(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemJson {
    pub delta: usize,
    pub nodes: Vec<ConfigJson>,
    pub edges: Vec<ConfigJson>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

pub fn config_json(c: &CondensedConfig) -> ConfigJson {
    c.items().iter().map(|(g, m)| (names(g.members()), *m)).collect()
}

pub fn config_from_json(c: &ConfigJson) -> Result<CondensedConfig, String> {
    let items = c
        .iter()
        .map(|(g, m)| {
            let ls = g.iter().map(|s| label(s)).collect::<Result<Vec<_>, _>>()?;
            Ok((Group::new(ls).map_err(|e| e.to_string())?, *m))
        })
        .collect::<Result<Vec<_>, String>>()?;
    if items.iter().any(|(_, m)| *m == 0) {
        return Err("multiplicities must be positive".into());
    }
    Ok(CondensedConfig::new(items))
}

fn constraint_from_json(arity: usize, cs: &[ConfigJson]) -> Result<Constraint, String> {
    let configs = cs.iter().map(config_from_json).collect::<Result<Vec<_>, _>>()?;
    Constraint::new(arity, configs).map_err(|e| e.to_string())
}

impl ProblemJson {
    pub fn from_problem(p: &Problem) -> Self {
        ProblemJson {
            delta: p.delta(),
            nodes: p.node_constraint().configs().iter().map(config_json).collect(),
            edges: p.edge_constraint().configs().iter().map(config_json).collect(),
            note: p.note.clone(),
        }
    }

    pub fn to_problem(&self) -> Result<Problem, String> {
        let node = constraint_from_json(self.delta, &self.nodes)?;
        let edge = constraint_from_json(2, &self.edges)?;
        Ok(Problem::new(self.delta, node, edge)
            .map_err(|e| e.to_string())?
            .with_note(self.note.clone()))
    }
}

pub fn set_json(s: &LabelSet) -> Vec<String> {
    names(s.members())
}

pub fn set_from_json(s: &[String]) -> Result<LabelSet, String> {
    if s.is_empty() {
        return Err("label sets must be nonempty".into());
    }
    Ok(LabelSet::new(s.iter().map(|x| label(x)).collect::<Result<Vec<_>, _>>()?))
}

pub fn set_config_json(c: &SetConfig) -> ConfigJson {
    c.slots().iter().map(|(s, m)| (set_json(s), *m)).collect()
}

pub fn set_config_from_json(c: &ConfigJson) -> Result<SetConfig, String> {
    let slots = c
        .iter()
        .map(|(s, m)| Ok((set_from_json(s)?, *m)))
        .collect::<Result<Vec<_>, String>>()?;
    if slots.iter().any(|(_, m)| *m == 0) {
        return Err("multiplicities must be positive".into());
    }
    Ok(SetConfig::new(slots))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedJson {
    pub problem: ProblemJson,
    /// Label name to the set it stands for.
    pub dictionary: BTreeMap<String, Vec<String>>,
    pub transform: String,
    pub source: String,
}

impl LiftedJson {
    pub fn from_lifted(l: &LiftedProblem) -> Self {
        LiftedJson {
            problem: ProblemJson::from_problem(&l.problem),
            dictionary: l
                .dictionary
                .iter()
                .map(|(n, s)| (n.as_str().to_string(), set_json(s)))
                .collect(),
            transform: match l.transform {
                Transform::Re => "re",
                Transform::Rere => "rere",
            }
            .to_string(),
            source: l.source_note.clone(),
        }
    }

    pub fn to_lifted(&self) -> Result<LiftedProblem, String> {
        let mut dictionary = self
            .dictionary
            .iter()
            .map(|(n, s)| Ok((label(n)?, set_from_json(s)?)))
            .collect::<Result<Vec<_>, String>>()?;
        dictionary.sort_by(|a, b| a.1.cmp(&b.1));
        Ok(LiftedProblem {
            problem: self.problem.to_problem()?,
            dictionary,
            transform: if self.transform == "re" { Transform::Re } else { Transform::Rere },
            source_note: self.source.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessJson {
    Config { config: String },
    SetConfig { config: String },
    Labels { labels: Vec<String> },
    Node { node: usize },
    Edge { edge: usize },
}

impl WitnessJson {
    pub fn from_witness(w: &Witness) -> Self {
        match w {
            Witness::Config(c) => WitnessJson::Config { config: c.to_string() },
            Witness::SetConfig(c) => WitnessJson::SetConfig { config: c.to_string() },
            Witness::Labels(ls) => WitnessJson::Labels { labels: names(ls) },
            Witness::Node(n) => WitnessJson::Node { node: *n },
            Witness::Edge(e) => WitnessJson::Edge { edge: *e },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub holds: bool,
    pub witness: Option<WitnessJson>,
    pub narrative: String,
}

impl VerdictJson {
    pub fn from_verdict(v: &Verdict) -> Self {
        VerdictJson {
            holds: v.holds,
            witness: v.witness.as_ref().map(WitnessJson::from_witness),
            narrative: v.narrative.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelaxationJson {
    pub relaxes: bool,
    /// Slot `i` of `from` goes to slot `witness[i]` of `to`, both unrolled.
    pub witness: Option<Vec<usize>>,
}

impl RelaxationJson {
    pub fn from_relaxation(r: Option<&Relaxation>) -> Self {
        RelaxationJson {
            relaxes: r.is_some(),
            witness: r.map(|r| r.witness.clone()),
        }
    }
}

pub fn side_name(s: Side) -> &'static str {
    match s {
        Side::Node => "node",
        Side::Edge => "edge",
    }
}

pub fn parse_side(s: &str) -> Result<Side, String> {
    match s {
        "node" | "nodes" => Ok(Side::Node),
        "edge" | "edges" => Ok(Side::Edge),
        other => Err(format!("unknown side {other:?}, expected node or edge")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub side: String,
    pub labels: Vec<String>,
    /// `[from, to]`: `to` is stronger.
    pub edges: Vec<(String, String)>,
    pub classes: Vec<Vec<String>>,
}

impl DiagramJson {
    pub fn from_diagram(d: &Diagram) -> Self {
        DiagramJson {
            side: side_name(d.side()).to_string(),
            labels: names(d.labels()),
            edges: d
                .edges()
                .iter()
                .map(|(a, b)| (a.as_str().to_string(), b.as_str().to_string()))
                .collect(),
            classes: d.classes().iter().map(|c| names(c)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub delta: usize,
    pub a: usize,
    pub x: usize,
}

impl From<FamilyParams> for ParamsJson {
    fn from(p: FamilyParams) -> Self {
        ParamsJson {
            delta: p.delta,
            a: p.a,
            x: p.x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepJson {
    pub index: usize,
    pub params: ParamsJson,
    pub stepped: ParamsJson,
    pub next: ParamsJson,
    pub margin: bool,
}

impl StepJson {
    pub fn from_step(s: &SequenceStep) -> Self {
        StepJson {
            index: s.index,
            params: s.params.into(),
            stepped: s.stepped.into(),
            next: s.next.into(),
            margin: s.margin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub delta: usize,
    pub x0: usize,
    pub epsilon: f64,
    pub t: usize,
    pub steps: Vec<StepJson>,
    pub final_params: ParamsJson,
    pub final_verdict: VerdictJson,
    pub x0_within_guidance: bool,
    pub statement: String,
}

impl CertificateJson {
    pub fn from_certificate(c: &SequenceCertificate) -> Self {
        CertificateJson {
            delta: c.delta,
            x0: c.x0,
            epsilon: c.epsilon,
            t: c.t,
            steps: c.steps.iter().map(StepJson::from_step).collect(),
            final_params: c.final_params.into(),
            final_verdict: VerdictJson::from_verdict(&c.final_verdict),
            x0_within_guidance: c.x0_within_guidance,
            statement: c.statement.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanizedJson {
    pub params: ParamsJson,
    pub stepped: ParamsJson,
    /// Engine name to dictionary name.
    pub renaming: BTreeMap<String, String>,
    pub re_problem: ProblemJson,
    pub verdict: VerdictJson,
}

impl MechanizedJson {
    pub fn from_step(m: &MechanizedStep) -> Self {
        MechanizedJson {
            params: m.params.into(),
            stepped: m.stepped.into(),
            renaming: m
                .renaming
                .pairs()
                .map(|(a, b)| (a.as_str().to_string(), b.as_str().to_string()))
                .collect(),
            re_problem: ProblemJson::from_problem(&m.re_problem),
            verdict: VerdictJson::from_verdict(&m.verdict),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureBoundJson {
    pub delta: usize,
    pub configs: usize,
    /// The bound is `1 / denominator`.
    pub denominator: u128,
    pub probability: f64,
    /// `delta^8`.
    pub threshold_denominator: u128,
    pub meets_threshold: bool,
}

impl FailureBoundJson {
    pub fn from_bound(b: &FailureBound) -> Self {
        FailureBoundJson {
            delta: b.delta,
            configs: b.configs,
            denominator: b.denominator,
            probability: b.probability(),
            threshold_denominator: (b.delta as u128).saturating_pow(8),
            meets_threshold: b.meets_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsJson {
    pub explored: u64,
    pub found: u64,
}

impl From<Stats> for StatsJson {
    fn from(s: Stats) -> Self {
        StatsJson {
            explored: s.explored,
            found: s.found,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub u: usize,
    pub v: usize,
    pub port_u: usize,
    pub port_v: usize,
    #[serde(default)]
    pub color: Option<usize>,
    /// Labels on the `u` and `v` halves.
    #[serde(default)]
    pub labels: [Option<String>; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub delta: usize,
    pub n: usize,
    #[serde(default)]
    pub symmetric: bool,
    pub edges: Vec<EdgeJson>,
}

impl TreeJson {
    pub fn from_tree(t: &LabeledTree, symmetric: bool) -> Self {
        TreeJson {
            delta: t.delta,
            n: t.n(),
            symmetric,
            edges: t
                .edges()
                .iter()
                .map(|e| EdgeJson {
                    u: e.u,
                    v: e.v,
                    port_u: e.port_u,
                    port_v: e.port_v,
                    color: e.color,
                    labels: [0, 1].map(|i| e.labels[i].as_ref().map(|l| l.as_str().to_string())),
                })
                .collect(),
        }
    }

    pub fn to_tree(&self) -> Result<LabeledTree, String> {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let mut labels = [None, None];
                for i in 0..2 {
                    if let Some(s) = &e.labels[i] {
                        labels[i] = Some(label(s)?);
                    }
                }
                Ok(Edge {
                    u: e.u,
                    v: e.v,
                    port_u: e.port_u,
                    port_v: e.port_v,
                    color: e.color,
                    labels,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        LabeledTree::from_edge_records(self.n, self.delta, edges, self.symmetric).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub in_set: Vec<bool>,
    /// `[edge, tail]` pairs.
    pub orientation: Vec<(usize, usize)>,
}

impl SolutionJson {
    pub fn from_solution(s: &DSolution) -> Self {
        SolutionJson {
            in_set: s.in_set.clone(),
            orientation: s.orientation.iter().map(|(e, t)| (*e, *t)).collect(),
        }
    }

    pub fn to_solution(&self) -> DSolution {
        DSolution {
            in_set: self.in_set.clone(),
            orientation: self.orientation.iter().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelingReportJson {
    pub verdict: VerdictJson,
    pub exempt: Vec<usize>,
}

impl LabelingReportJson {
    pub fn from_report(r: &LabelingReport) -> Self {
        LabelingReportJson {
            verdict: VerdictJson::from_verdict(&r.verdict),
            exempt: r.exempt.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use roundelim_core::family::make_mis_problem;
    use roundelim_core::simulator::random_tree;

    #[test]
    fn problem_round_trip() {
        let p = make_mis_problem(3).unwrap();
        let j = ProblemJson::from_problem(&p);
        assert_eq!(
            serde_json::to_string(&j.nodes).unwrap(),
            r#"[[[["M"],3]],[[["O"],2],[["P"],1]]]"#
        );
        assert_eq!(j.to_problem().unwrap(), p);
    }

    #[test]
    fn bad_problems() {
        let j: ProblemJson = serde_json::from_str(r#"{"delta":3,"nodes":[[[["M"],2]]],"edges":[]}"#).unwrap();
        assert!(j.to_problem().is_err());
        let j: ProblemJson = serde_json::from_str(r#"{"delta":2,"nodes":[[[[],2]]],"edges":[]}"#).unwrap();
        assert!(j.to_problem().is_err());
    }

    #[test]
    fn tree_round_trip() {
        let t = random_tree(20, 3, 4, true).unwrap();
        let j = TreeJson::from_tree(&t, true);
        assert_eq!(j.to_tree().unwrap(), t);
        let mut broken = j.clone();
        broken.edges.pop();
        assert!(broken.to_tree().is_err());
    }
}
