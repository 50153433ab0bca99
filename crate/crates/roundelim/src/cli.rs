//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a check's verdict is false, 2 on usage,
//! parse or engine errors.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use roundelim_core::parse_config;

use crate::json::{config_json, LiftedJson, ParamsJson, TreeJson};
use crate::ops::{self, OpError, Output, ProblemInput};
use crate::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "roundelim", version, about = "Round elimination for locally checkable problems")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Problem file in text or JSON form; `-` or absent reads stdin.
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub max_labels: Option<usize>,
    #[arg(long)]
    pub max_configs: Option<usize>,
    /// Compare the pruned maximal search with an unpruned one.
    #[arg(long)]
    pub brute_force: bool,
    /// Lines `OLD NEW` renaming output labels.
    #[arg(long)]
    pub rename_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SideArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value = "edge")]
    pub side: String,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub delta: usize,
    #[arg(long)]
    pub a: usize,
    #[arg(long)]
    pub x: usize,
}

impl ParamArgs {
    fn json(&self) -> ParamsJson {
        ParamsJson {
            delta: self.delta,
            a: self.a,
            x: self.x,
        }
    }
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    /// Tree JSON file; otherwise a random tree is generated.
    #[arg(long)]
    pub tree: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub delta: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and print a problem in canonical form.
    Parse(Input),
    /// One half-step: maximal edge sets, existential node side.
    Re(EngineArgs),
    /// The other half-step: maximal node sets, existential edge side.
    Rere(EngineArgs),
    /// Strength diagram of one side, as DOT.
    Diagram(SideArgs),
    /// Right-closed sets of one side's diagram.
    RightClosed(SideArgs),
    /// Drop configurations covered by the others.
    Simplify(Input),
    /// The family problem `Pi(a, x)`.
    Family(ParamArgs),
    /// `Pi+(a, x)`.
    Plus(ParamArgs),
    /// Maximal independent set.
    Mis {
        #[arg(long)]
        delta: usize,
    },
    /// Closed form of `re(Pi(a, x))`.
    ExpectedRe(ParamArgs),
    /// Lower-bound sequence certificate.
    Sequence {
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        x0: usize,
        #[arg(long)]
        epsilon: f64,
        /// Also run each transition through the engine.
        #[arg(long)]
        mechanize: bool,
    },
    /// Zero-round solvability with symmetric ports.
    ZeroRound(Input),
    /// Failure probability of randomized zero-round algorithms.
    FailureBound(Input),
    /// Whether one set configuration relaxes to another; groups are sets.
    RelaxCheck {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Check a speedup step, by parameters or by problem and target.
    SpeedupVerify {
        #[arg(long)]
        delta: Option<usize>,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        x: Option<usize>,
        /// Problem file, used with `--target`.
        file: Option<PathBuf>,
        /// Lifted target problem as JSON.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Label bijection between two problems.
    Iso { left: PathBuf, right: PathBuf },
    /// Run labelings and transformations on trees.
    #[command(subcommand)]
    Simulate(Simulate),
    /// Run the mechanized checks for degrees up to `--delta-max`.
    VerifyPaper {
        #[arg(long)]
        delta_max: usize,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "ROUNDELIM_BIND", default_value = "127.0.0.1:8080")]
        bind: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum Simulate {
    /// Greedy k-outdegree dominating set, encoded as a family labeling.
    Kods {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        a: usize,
    },
    /// Label with `Pi+(a, x)` and recolor into the stepped family problem.
    PlusTransform {
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        x: usize,
    },
    /// Check a labeled tree against a problem.
    Check {
        #[arg(long)]
        tree: PathBuf,
        problem: Option<PathBuf>,
    },
}

fn read_source(path: Option<&PathBuf>) -> Result<String, OpError> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| OpError::BadRequest(format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| OpError::BadRequest(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

/// Text starting with `{` is taken as JSON.
fn problem_input(path: Option<&PathBuf>) -> Result<ProblemInput, OpError> {
    let s = read_source(path)?;
    if s.trim_start().starts_with('{') {
        serde_json::from_str(&s).map(ProblemInput::Json).map_err(|e| OpError::BadRequest(e.to_string()))
    } else {
        Ok(ProblemInput::Text(s))
    }
}

fn json_file<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, OpError> {
    serde_json::from_str(&read_source(Some(path))?).map_err(|e| OpError::BadRequest(format!("{}: {e}", path.display())))
}

pub fn parse_rename(text: &str) -> Result<BTreeMap<String, String>, OpError> {
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().filter(|s| *s != "->").collect();
        let [from, to] = parts[..] else {
            return Err(OpError::BadRequest(format!("rename line `{line}`: expected `OLD NEW`")));
        };
        out.insert(from.to_string(), to.to_string());
    }
    Ok(out)
}

fn engine_req(a: &EngineArgs) -> Result<ops::EngineReq, OpError> {
    Ok(ops::EngineReq {
        problem: problem_input(a.input.file.as_ref())?,
        limits: ops::LimitsJson {
            max_labels: a.max_labels,
            max_configs: a.max_configs,
            max_expansion: None,
            verify_brute_force: a.brute_force,
        },
        rename: match &a.rename_file {
            Some(p) => parse_rename(&read_source(Some(p))?)?,
            None => BTreeMap::new(),
        },
    })
}

fn set_config(text: &str) -> Result<Vec<(Vec<String>, usize)>, OpError> {
    parse_config(text, 1)
        .map(|c| config_json(&c))
        .map_err(|e| OpError::BadRequest(e.to_string()))
}

fn tree_source(t: &TreeArgs) -> Result<ops::TreeSource, OpError> {
    Ok(ops::TreeSource {
        tree: t.tree.as_ref().map(json_file::<TreeJson>).transpose()?,
        n: t.n,
        delta: t.delta,
        seed: t.seed,
    })
}

/// Runs one command that produces an [`Output`].
pub fn execute(cmd: &Command) -> Result<Output, OpError> {
    match cmd {
        Command::Parse(i) => ops::parse(&read_source(i.file.as_ref())?),
        Command::Re(a) => ops::run_re(&engine_req(a)?, None),
        Command::Rere(a) => ops::run_rere(&engine_req(a)?, None),
        Command::Diagram(s) | Command::RightClosed(s) => {
            let req = ops::SideReq {
                problem: problem_input(s.input.file.as_ref())?,
                side: s.side.clone(),
            };
            if matches!(cmd, Command::Diagram(_)) {
                ops::diagram(&req)
            } else {
                ops::right_closed(&req)
            }
        }
        Command::Simplify(i) => ops::simplify(&problem_input(i.file.as_ref())?),
        Command::Family(p) => ops::family(&p.json()),
        Command::Plus(p) => ops::plus(&p.json()),
        Command::Mis { delta } => ops::mis(*delta),
        Command::ExpectedRe(p) => ops::expected_re(&p.json()),
        Command::Sequence {
            delta,
            x0,
            epsilon,
            mechanize,
        } => ops::sequence(
            &ops::SequenceReq {
                delta: *delta,
                x0: *x0,
                epsilon: *epsilon,
                mechanize: *mechanize,
                limits: ops::LimitsJson::default(),
            },
            None,
        ),
        Command::ZeroRound(i) => ops::zero_round(&problem_input(i.file.as_ref())?),
        Command::FailureBound(i) => ops::failure_bound(&problem_input(i.file.as_ref())?),
        Command::RelaxCheck { from, to } => ops::relax_check(&ops::RelaxReq {
            from: set_config(from)?,
            to: set_config(to)?,
        }),
        Command::SpeedupVerify {
            delta,
            a,
            x,
            file,
            target,
        } => {
            let params = match (delta, a, x) {
                (Some(delta), Some(a), Some(x)) => Some(ParamsJson {
                    delta: *delta,
                    a: *a,
                    x: *x,
                }),
                (None, None, None) => None,
                _ => return Err(OpError::BadRequest("give all of --delta, --a, --x".into())),
            };
            let (problem, target) = match (params.is_some(), target) {
                (true, _) => (None, None),
                (false, Some(t)) => (Some(problem_input(file.as_ref())?), Some(json_file::<LiftedJson>(t)?)),
                (false, None) => return Err(OpError::BadRequest("give --delta/--a/--x or --target".into())),
            };
            ops::speedup_verify(
                &ops::SpeedupReq {
                    params,
                    problem,
                    target,
                    limits: ops::LimitsJson::default(),
                },
                None,
            )
        }
        Command::Iso { left, right } => ops::iso(&ops::IsoReq {
            left: problem_input(Some(left))?,
            right: problem_input(Some(right))?,
        }),
        Command::Simulate(Simulate::Kods { tree, k, a }) => ops::simulate_kods(&ops::KodsReq {
            source: tree_source(tree)?,
            k: *k,
            a: *a,
        }),
        Command::Simulate(Simulate::PlusTransform { tree, a, x }) => ops::simulate_transform(&ops::TransformReq {
            source: tree_source(tree)?,
            a: *a,
            x: *x,
        }),
        Command::Simulate(Simulate::Check { tree, problem }) => ops::simulate_check(&ops::CheckReq {
            tree: json_file(tree)?,
            problem: problem_input(problem.as_ref())?,
        }),
        Command::VerifyPaper { delta_max } => {
            let rows = verify::run_suite(*delta_max);
            let passed = rows.iter().all(|r| r.passed);
            Ok(Output {
                value: serde_json::to_value(&rows).expect("serializable"),
                text: verify::table(&rows),
                holds: Some(passed),
                stats: None,
            })
        }
        Command::Serve { .. } => unreachable!("handled by run"),
    }
}

fn serve(bind: &str) -> Result<(), String> {
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(bind).await.map_err(|e| format!("{bind}: {e}"))?;
        eprintln!("listening on {}", listener.local_addr().map_err(|e| e.to_string())?);
        axum::serve(listener, crate::api::router(crate::api::AppState::default()))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| e.to_string())
    })
}

pub fn run(cli: Cli) -> ExitCode {
    if let Command::Serve { bind } = &cli.command {
        return match serve(bind) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }
    match execute(&cli.command) {
        Ok(out) => {
            let text = match cli.format {
                Format::Text => out.text.clone(),
                Format::Json => out.json_text(),
            };
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            let _ = stdout.flush();
            if out.holds == Some(false) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            match cli.format {
                Format::Text => eprintln!("error: {}", e.message()),
                Format::Json => eprintln!("{}", e.to_json()),
            }
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rename_lines() {
        let m = parse_rename("# comment\nA B\nC -> D\n\n").unwrap();
        assert_eq!(m.get("A").unwrap(), "B");
        assert_eq!(m.get("C").unwrap(), "D");
        assert!(parse_rename("A B C").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
