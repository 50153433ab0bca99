//! Engine operations with JSON requests and responses, shared by the command
//! line and the HTTP service.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::fmt::Write;
use std::sync::atomic::AtomicBool;

use roundelim_core::analysis::{
    randomized_failure_bound, relaxes_to, simplify_subsumed, verify_speedup_target,
    zero_round_solvable_symmetric, AnalysisError,
};
use roundelim_core::family::{
    build_sequence, expected_re_problem, make_family_problem, make_mis_problem, make_plus_problem,
    mechanize_step, mechanize_transitions, sequence_length, FamilyError, FamilyParams,
};
use roundelim_core::simulator::{
    check_kods, check_labeling, generate_valid_labeling, greedy_kods, kods_to_family_labeling,
    plus_to_family_transform, proper_edge_coloring, random_tree, LabeledTree, SimError,
};
use roundelim_core::{
    build_diagram_with, parse_problem, problems_isomorphic, re, rename_problem, rere,
    right_closed_sets, serialize_problem, EngineError, Label, LiftedProblem, Limits, Options,
    Problem, RenamingMap, Side, Stats,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dot::{diagram_dot, tree_dot};
use crate::json::*;

#[derive(Debug, Clone, PartialEq)]
pub enum OpError {
    BadRequest(String),
    NotFound(String),
    Cancelled(Option<StatsJson>),
    Precondition(String),
    BlowUp { message: String, stats: Option<StatsJson> },
}

impl OpError {
    pub fn status(&self) -> u16 {
        match self {
            OpError::BadRequest(_) => 400,
            OpError::NotFound(_) => 404,
            OpError::Cancelled(_) => 409,
            OpError::Precondition(_) => 422,
            OpError::BlowUp { .. } => 503,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            OpError::BadRequest(_) => "bad_request",
            OpError::NotFound(_) => "not_found",
            OpError::Cancelled(_) => "cancelled",
            OpError::Precondition(_) => "precondition",
            OpError::BlowUp { .. } => "blow_up",
        }
    }

    pub fn message(&self) -> String {
        match self {
            OpError::BadRequest(m) | OpError::NotFound(m) | OpError::Precondition(m) => m.clone(),
            OpError::Cancelled(_) => "cancelled".into(),
            OpError::BlowUp { message, .. } => message.clone(),
        }
    }

    pub fn stats(&self) -> Option<&StatsJson> {
        match self {
            OpError::Cancelled(s) | OpError::BlowUp { stats: s, .. } => s.as_ref(),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "error": { "code": self.code(), "message": self.message() },
            "stats": self.stats(),
        })
    }
}

impl std::fmt::Display for OpError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code(), self.message())
    }
}

impl From<EngineError> for OpError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Cancelled { stats } => OpError::Cancelled(Some(stats.into())),
            EngineError::BlowUp { stats, .. } => OpError::BlowUp {
                message: e.to_string(),
                stats: Some(stats.into()),
            },
            EngineError::AlphabetTooLarge { .. } => OpError::BlowUp {
                message: e.to_string(),
                stats: None,
            },
            EngineError::BruteForceMismatch(_) => OpError::Precondition(e.to_string()),
        }
    }
}

impl From<AnalysisError> for OpError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Engine(e) => e.into(),
            other => OpError::Precondition(other.to_string()),
        }
    }
}

impl From<FamilyError> for OpError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Engine(e) => e.into(),
            FamilyError::Analysis(e) => e.into(),
            other => OpError::Precondition(other.to_string()),
        }
    }
}

impl From<SimError> for OpError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Params(_)
            | SimError::InvalidInput(_)
            | SimError::InvalidSolution(_)
            | SimError::MissingColoring
            | SimError::Collision { .. } => OpError::Precondition(e.to_string()),
            _ => OpError::BadRequest(e.to_string()),
        }
    }
}

fn bad(e: impl ToString) -> OpError {
    OpError::BadRequest(e.to_string())
}

/// Result of an operation: the JSON payload, its text rendering, and for
/// checks, the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub value: Value,
    pub text: String,
    pub holds: Option<bool>,
    pub stats: Option<StatsJson>,
}

impl Output {
    fn new(value: impl Serialize, text: String) -> Self {
        Output {
            value: serde_json::to_value(value).expect("serializable"),
            text,
            holds: None,
            stats: None,
        }
    }

    fn verdict(mut self, holds: bool) -> Self {
        self.holds = Some(holds);
        self
    }

    /// Canonical JSON text, as printed by the command line.
    pub fn json_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.value).expect("serializable");
        s.push('\n');
        s
    }
}

/// A problem given as text or as its JSON mirror.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemInput {
    Text(String),
    Json(ProblemJson),
}

impl ProblemInput {
    pub fn resolve(&self) -> Result<Problem, OpError> {
        match self {
            ProblemInput::Text(t) => parse_problem(t).map_err(bad),
            ProblemInput::Json(j) => j.to_problem().map_err(OpError::BadRequest),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitsJson {
    #[serde(default)]
    pub max_labels: Option<usize>,
    #[serde(default)]
    pub max_configs: Option<usize>,
    #[serde(default)]
    pub max_expansion: Option<usize>,
    /// Re-run maximal-configuration searches without pruning and compare.
    #[serde(default)]
    pub verify_brute_force: bool,
}

impl LimitsJson {
    fn limits(&self) -> Limits {
        let d = Limits::default();
        Limits {
            max_labels: self.max_labels.unwrap_or(d.max_labels),
            max_configs: self.max_configs.unwrap_or(d.max_configs),
            max_expansion: self.max_expansion.unwrap_or(d.max_expansion),
        }
    }
}

/// Runs `f` with options built from `limits` and `cancel`, recording the
/// last progress report.
fn with_options<T>(
    limits: &LimitsJson,
    cancel: Option<&AtomicBool>,
    f: impl FnOnce(&Options) -> Result<T, OpError>,
) -> Result<(T, Option<StatsJson>), OpError> {
    let last: Cell<Option<Stats>> = Cell::new(None);
    let progress = |s: Stats| last.set(Some(s));
    let opts = Options {
        limits: limits.limits(),
        cancel,
        progress: Some(&progress),
        verify_brute_force: limits.verify_brute_force,
    };
    let out = f(&opts)?;
    Ok((out, last.get().map(Into::into)))
}

pub fn parse(text: &str) -> Result<Output, OpError> {
    let p = parse_problem(text).map_err(bad)?;
    Ok(Output::new(ProblemJson::from_problem(&p), serialize_problem(&p)))
}

pub fn serialize(p: &ProblemInput) -> Result<Output, OpError> {
    let p = p.resolve()?;
    let text = serialize_problem(&p);
    Ok(Output::new(json!({ "text": text }), text))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineReq {
    pub problem: ProblemInput,
    #[serde(default)]
    pub limits: LimitsJson,
    /// Renames output labels; labels not mentioned keep their names.
    #[serde(default)]
    pub rename: BTreeMap<String, String>,
}

fn rename_lifted(l: LiftedProblem, names: &BTreeMap<String, String>) -> Result<LiftedProblem, OpError> {
    if names.is_empty() {
        return Ok(l);
    }
    let pairs = l
        .problem
        .alphabet()
        .iter()
        .map(|from| {
            let to = match names.get(from.as_str()) {
                Some(n) => Label::new(n).map_err(bad)?,
                None => from.clone(),
            };
            Ok((from.clone(), to))
        })
        .collect::<Result<Vec<_>, OpError>>()?;
    let m = RenamingMap::new(pairs).map_err(bad)?;
    let problem = rename_problem(&l.problem, &m).map_err(bad)?;
    let mut dictionary: Vec<_> = l
        .dictionary
        .iter()
        .map(|(n, s)| (m.get(n).cloned().unwrap_or_else(|| n.clone()), s.clone()))
        .collect();
    dictionary.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(LiftedProblem {
        problem,
        dictionary,
        ..l
    })
}

pub fn lifted_text(l: &LiftedProblem) -> String {
    let mut out = serialize_problem(&l.problem);
    for (n, s) in &l.dictionary {
        writeln!(out, "# {n} = {s}").unwrap();
    }
    out
}

fn lifted_output(l: &LiftedProblem, stats: Option<StatsJson>) -> Output {
    let mut o = Output::new(LiftedJson::from_lifted(l), lifted_text(l));
    o.stats = stats;
    o
}

pub fn run_re(req: &EngineReq, cancel: Option<&AtomicBool>) -> Result<Output, OpError> {
    let p = req.problem.resolve()?;
    let (l, stats) = with_options(&req.limits, cancel, |o| Ok(re(&p, o)?))?;
    Ok(lifted_output(&rename_lifted(l, &req.rename)?, stats))
}

pub fn run_rere(req: &EngineReq, cancel: Option<&AtomicBool>) -> Result<Output, OpError> {
    let p = req.problem.resolve()?;
    let (l, stats) = with_options(&req.limits, cancel, |o| Ok(rere(&p, o)?))?;
    Ok(lifted_output(&rename_lifted(l, &req.rename)?, stats))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideReq {
    pub problem: ProblemInput,
    #[serde(default = "edge_side")]
    pub side: String,
}

fn edge_side() -> String {
    "edge".into()
}

pub fn diagram(req: &SideReq) -> Result<Output, OpError> {
    let p = req.problem.resolve()?;
    let side = parse_side(&req.side).map_err(OpError::BadRequest)?;
    let d = build_diagram_with(&p, side, &Limits::default())?;
    let dot = diagram_dot(&d);
    let mut value = serde_json::to_value(DiagramJson::from_diagram(&d)).expect("serializable");
    value["dot"] = Value::String(dot.clone());
    Ok(Output {
        value,
        text: dot,
        holds: None,
        stats: None,
    })
}

pub fn right_closed(req: &SideReq) -> Result<Output, OpError> {
    let p = req.problem.resolve()?;
    let side = parse_side(&req.side).map_err(OpError::BadRequest)?;
    let d = build_diagram_with(&p, side, &Limits::default())?;
    let sets = right_closed_sets(&d);
    let text = sets.iter().map(|s| format!("{s}\n")).collect();
    Ok(Output::new(json!({ "side": side_name(side), "sets": sets.iter().map(set_json).collect::<Vec<_>>() }), text))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelaxReq {
    pub from: ConfigJson,
    pub to: ConfigJson,
}

pub fn relax_check(req: &RelaxReq) -> Result<Output, OpError> {
    let from = set_config_from_json(&req.from).map_err(OpError::BadRequest)?;
    let to = set_config_from_json(&req.to).map_err(OpError::BadRequest)?;
    let r = relaxes_to(&from, &to)?;
    let text = match &r {
        Some(r) => format!("{from} relaxes to {to} via slots {:?}\n", r.witness),
        None => format!("{from} does not relax to {to}\n"),
    };
    Ok(Output::new(RelaxationJson::from_relaxation(r.as_ref()), text).verdict(r.is_some()))
}

fn verdict_text(v: &VerdictJson) -> String {
    let mut out = format!("holds: {}\n", v.holds);
    if let Some(w) = &v.witness {
        let w = match w {
            WitnessJson::Config { config } | WitnessJson::SetConfig { config } => config.clone(),
            WitnessJson::Labels { labels } => labels.join(" "),
            WitnessJson::Node { node } => format!("node {node}"),
            WitnessJson::Edge { edge } => format!("edge {edge}"),
        };
        writeln!(out, "witness: {w}").unwrap();
    }
    writeln!(out, "{}", v.narrative).unwrap();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeedupReq {
    /// Family parameters: runs the whole pipeline on `Pi(a, x)`.
    #[serde(default)]
    pub params: Option<ParamsJson>,
    /// Otherwise an already re'd problem and a target with its dictionary.
    #[serde(default)]
    pub problem: Option<ProblemInput>,
    #[serde(default)]
    pub target: Option<LiftedJson>,
    #[serde(default)]
    pub limits: LimitsJson,
}

fn family_params(p: &ParamsJson) -> Result<FamilyParams, OpError> {
    Ok(FamilyParams::new(p.delta, p.a, p.x)?)
}

pub fn speedup_verify(req: &SpeedupReq, cancel: Option<&AtomicBool>) -> Result<Output, OpError> {
    if let Some(params) = &req.params {
        let params = family_params(params)?;
        let (m, stats) = with_options(&req.limits, cancel, |o| Ok(mechanize_step(params, o)?))?;
        let j = MechanizedJson::from_step(&m);
        let mut text = format!("{params} steps to {}\n", m.stepped);
        text.push_str(&verdict_text(&j.verdict));
        let mut o = Output::new(j, text).verdict(m.verdict.holds);
        o.stats = stats;
        return Ok(o);
    }
    let (Some(p), Some(t)) = (&req.problem, &req.target) else {
        return Err(bad("give either params or both problem and target"));
    };
    let p = p.resolve()?;
    let t = t.to_lifted().map_err(OpError::BadRequest)?;
    let (v, stats) = with_options(&req.limits, cancel, |o| Ok(verify_speedup_target(&p, &t, o)?))?;
    let j = VerdictJson::from_verdict(&v);
    let text = verdict_text(&j);
    let mut o = Output::new(j, text).verdict(v.holds);
    o.stats = stats;
    Ok(o)
}

pub fn zero_round(p: &ProblemInput) -> Result<Output, OpError> {
    let v = zero_round_solvable_symmetric(&p.resolve()?);
    let j = VerdictJson::from_verdict(&v);
    let text = verdict_text(&j);
    Ok(Output::new(j, text).verdict(v.holds))
}

pub fn failure_bound(p: &ProblemInput) -> Result<Output, OpError> {
    let b = randomized_failure_bound(&p.resolve()?)?;
    let j = FailureBoundJson::from_bound(&b);
    let text = format!(
        "failure probability >= 1/{} = {:e} ({} configurations, delta {}); {} 1/delta^8\n",
        j.denominator,
        j.probability,
        j.configs,
        j.delta,
        if j.meets_threshold { "at least" } else { "below" }
    );
    Ok(Output::new(j, text).verdict(b.meets_threshold))
}

pub fn simplify(p: &ProblemInput) -> Result<Output, OpError> {
    let p = p.resolve()?;
    let s = Problem::new(
        p.delta(),
        simplify_subsumed(p.node_constraint()),
        simplify_subsumed(p.edge_constraint()),
    )
    .map_err(bad)?
    .with_note(p.note.clone());
    Ok(Output::new(ProblemJson::from_problem(&s), serialize_problem(&s)))
}

fn problem_output(p: &Problem) -> Output {
    Output::new(ProblemJson::from_problem(p), serialize_problem(p))
}

pub fn family(p: &ParamsJson) -> Result<Output, OpError> {
    Ok(problem_output(&make_family_problem(family_params(p)?)))
}

pub fn plus(p: &ParamsJson) -> Result<Output, OpError> {
    Ok(problem_output(&make_plus_problem(family_params(p)?)?))
}

pub fn mis(delta: usize) -> Result<Output, OpError> {
    Ok(problem_output(&make_mis_problem(delta)?))
}

pub fn expected_re(p: &ParamsJson) -> Result<Output, OpError> {
    Ok(problem_output(&expected_re_problem(family_params(p)?)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceReq {
    pub delta: usize,
    pub x0: usize,
    pub epsilon: f64,
    /// Also run every transition through the engine (small `delta` only).
    #[serde(default)]
    pub mechanize: bool,
    #[serde(default)]
    pub limits: LimitsJson,
}

fn certificate_text(c: &CertificateJson) -> String {
    let mut out = format!("delta {} x0 {} epsilon {} t {}\n", c.delta, c.x0, c.epsilon, c.t);
    out.push_str("step  a  x  ->  a'  x'  next a  next x  x<a/8\n");
    for s in &c.steps {
        writeln!(
            out,
            "{}  {}  {}  ->  {}  {}  {}  {}  {}",
            s.index, s.params.a, s.params.x, s.stepped.a, s.stepped.x, s.next.a, s.next.x, s.margin
        )
        .unwrap();
    }
    writeln!(
        out,
        "final ({}, {}): zero-round solvable {}",
        c.final_params.a, c.final_params.x, c.final_verdict.holds
    )
    .unwrap();
    writeln!(out, "x0 <= delta^epsilon: {}", c.x0_within_guidance).unwrap();
    writeln!(out, "{}", c.statement).unwrap();
    out
}

pub fn sequence(req: &SequenceReq, cancel: Option<&AtomicBool>) -> Result<Output, OpError> {
    if !req.epsilon.is_finite() || req.epsilon < 0.0 {
        return Err(bad("epsilon must be a finite nonnegative number"));
    }
    if !req.mechanize {
        let c = CertificateJson::from_certificate(&build_sequence(req.delta, req.x0, req.epsilon)?);
        let text = certificate_text(&c);
        return Ok(Output::new(c, text).verdict(true));
    }
    if req.delta > 6 {
        return Err(OpError::Precondition("mechanized sequences need delta <= 6".into()));
    }
    let t = sequence_length(req.delta, req.epsilon);
    let (steps, stats) = with_options(&req.limits, cancel, |o| Ok(mechanize_transitions(req.delta, req.x0, t, o)?))?;
    let certificate = build_sequence(req.delta, req.x0, req.epsilon);
    let mut text = String::new();
    let transitions: Vec<Value> = steps
        .iter()
        .map(|(s, m)| {
            writeln!(
                text,
                "step {}: {} -> {} (next {}): {}",
                s.index,
                s.params,
                m.stepped,
                s.next,
                m.verdict.narrative
            )
            .unwrap();
            json!({ "step": StepJson::from_step(s), "mechanized": MechanizedJson::from_step(m) })
        })
        .collect();
    let transitions_hold = steps.iter().all(|(_, m)| m.verdict.holds);
    let (cert, refusal) = match &certificate {
        Ok(c) => {
            let c = CertificateJson::from_certificate(c);
            text.push_str(&certificate_text(&c));
            (Some(c), None)
        }
        Err(e) => {
            writeln!(text, "no certificate: {e}").unwrap();
            (None, Some(e.to_string()))
        }
    };
    let holds = transitions_hold && cert.is_some();
    let value = json!({
        "t": t,
        "transitions": transitions,
        "transitions_hold": transitions_hold,
        "certificate": cert,
        "refusal": refusal,
    });
    let mut o = Output::new(value, text).verdict(holds);
    o.stats = stats;
    Ok(o)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoReq {
    pub left: ProblemInput,
    pub right: ProblemInput,
}

pub fn iso(req: &IsoReq) -> Result<Output, OpError> {
    let (a, b) = (req.left.resolve()?, req.right.resolve()?);
    let m = problems_isomorphic(&a, &b);
    let map: Option<BTreeMap<String, String>> = m.as_ref().map(|m| {
        m.pairs()
            .map(|(x, y)| (x.as_str().to_string(), y.as_str().to_string()))
            .collect()
    });
    let text = match &map {
        Some(map) => map.iter().map(|(x, y)| format!("{x} -> {y}\n")).collect(),
        None => "not isomorphic\n".to_string(),
    };
    Ok(Output::new(json!({ "isomorphic": map.is_some(), "map": map }), text).verdict(m.is_some()))
}

/// A tree given inline or generated from a seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSource {
    #[serde(default)]
    pub tree: Option<TreeJson>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_delta")]
    pub delta: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_n() -> usize {
    30
}

fn default_delta() -> usize {
    4
}

impl TreeSource {
    fn build(&self) -> Result<LabeledTree, OpError> {
        let t = match &self.tree {
            Some(t) => t.to_tree().map_err(OpError::BadRequest)?,
            None => random_tree(self.n, self.delta, self.seed, false)?,
        };
        Ok(if t.has_coloring() { t } else { proper_edge_coloring(&t)? })
    }
}

fn tree_output(t: &LabeledTree, report: &LabelingReportJson, extra: Value) -> Output {
    let mut value = json!({
        "tree": TreeJson::from_tree(t, false),
        "check": report,
    });
    if let (Value::Object(v), Value::Object(e)) = (&mut value, extra) {
        v.extend(e);
    }
    let mut text = verdict_text(&report.verdict);
    writeln!(text, "exempt nodes: {:?}", report.exempt).unwrap();
    text.push_str(&tree_dot(t));
    Output::new(value, text).verdict(report.verdict.holds)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KodsReq {
    #[serde(flatten)]
    pub source: TreeSource,
    pub k: usize,
    pub a: usize,
}

pub fn simulate_kods(req: &KodsReq) -> Result<Output, OpError> {
    let t = req.source.build()?;
    if req.k > t.delta || req.a > t.delta {
        return Err(OpError::Precondition("k <= delta and a <= delta".into()));
    }
    let sol = greedy_kods(&t, req.k);
    let kods = check_kods(&t, &sol, req.k);
    let labeled = kods_to_family_labeling(&t, &sol, req.a, req.k)?;
    let p = make_family_problem(family_params(&ParamsJson {
        delta: t.delta,
        a: req.a,
        x: req.k,
    })?);
    let report = LabelingReportJson::from_report(&check_labeling(&labeled, &p)?);
    Ok(tree_output(
        &labeled,
        &report,
        json!({ "solution": SolutionJson::from_solution(&sol), "solution_check": VerdictJson::from_verdict(&kods) }),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformReq {
    #[serde(flatten)]
    pub source: TreeSource,
    pub a: usize,
    pub x: usize,
}

/// Labels the tree with `Pi+(a, x)` (unless it is already labeled), applies
/// the coloring transform and checks against the stepped family problem.
pub fn simulate_transform(req: &TransformReq) -> Result<Output, OpError> {
    let t = req.source.build()?;
    let params = family_params(&ParamsJson {
        delta: t.delta,
        a: req.a,
        x: req.x,
    })?;
    if 2 * req.x + 1 > req.a {
        return Err(OpError::Precondition("2x+1 <= a".into()));
    }
    let labeled = t.edges().iter().all(|e| e.labels.iter().all(Option::is_some)) && t.n() > 1;
    let input = if labeled {
        t
    } else {
        let plus = make_plus_problem(params)?;
        generate_valid_labeling(&t, &plus, req.source.seed)
            .ok_or_else(|| OpError::Precondition("the tree has no valid plus labeling".into()))?
    };
    let out = plus_to_family_transform(&input, req.a, req.x)?;
    let target = FamilyParams::new(t_delta(&input), (req.a - 2 * req.x - 1) / 2, req.x + 1)?;
    let report = LabelingReportJson::from_report(&check_labeling(&out, &make_family_problem(target))?);
    Ok(tree_output(
        &out,
        &report,
        json!({ "input": TreeJson::from_tree(&input, false), "target": ParamsJson::from(target) }),
    ))
}

fn t_delta(t: &LabeledTree) -> usize {
    t.delta
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReq {
    pub tree: TreeJson,
    pub problem: ProblemInput,
}

pub fn simulate_check(req: &CheckReq) -> Result<Output, OpError> {
    let t = req.tree.to_tree().map_err(OpError::BadRequest)?;
    let p = req.problem.resolve()?;
    if p.delta() != t.delta {
        return Err(bad(format!("tree degree cap {} differs from problem delta {}", t.delta, p.delta())));
    }
    let report = LabelingReportJson::from_report(&check_labeling(&t, &p)?);
    Ok(tree_output(&t, &report, json!({})))
}

pub fn side_of(s: &str) -> Result<Side, OpError> {
    parse_side(s).map_err(OpError::BadRequest)
}
