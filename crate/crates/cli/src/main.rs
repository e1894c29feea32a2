//! `junctionc`: compile discrete Markov networks into junction trees and
//! Almond trees, query marginals, and run the randomized verification suites.
//!
//! Exit codes: 0 success, 1 failed verification, 2 unreadable or malformed
//! input, 3 invalid model, 4 impossible evidence.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use junctionc::compile::{compile_graph, CompilationReport, CompileOptions};
use junctionc::model::{Model, ModelError};
use junctionc::verify::{run_suite, Suite, SuiteReport, DEFAULT_CASES, DEFAULT_SEED};
use junctionc::{Error, Objective};

#[derive(Parser)]
#[command(name = "junctionc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Triangulate a model, build its junction tree and report the structure.
    Compile {
        model: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Print posterior marginals given evidence.
    Query {
        model: PathBuf,
        /// Observation `variable=state`; the state is a label or an index.
        #[arg(long, value_name = "VAR=STATE")]
        evidence: Vec<String>,
        /// Variable to report; all variables when omitted.
        #[arg(long, value_name = "VAR")]
        marginal: Vec<String>,
        #[command(flatten)]
        build: BuildArgs,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Run randomized checks against brute-force enumeration.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, env = "JUNCTIONC_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CASES)]
        cases: usize,
        /// Print a line for every passing case.
        #[arg(long)]
        verbose: bool,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
}

#[derive(Args)]
struct BuildArgs {
    /// What the triangulation minimizes.
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Fill)]
    objective: ObjectiveArg,
    /// Search all elimination orders (small models only).
    #[arg(long)]
    optimal: bool,
    /// Build an Almond tree as well and propagate on it.
    #[arg(long)]
    almond: bool,
}

impl BuildArgs {
    fn options(&self) -> CompileOptions {
        CompileOptions {
            objective: match self.objective {
                ObjectiveArg::Fill => Objective::FillIn,
                ObjectiveArg::Weight => Objective::CliqueWeight,
            },
            optimal: self.optimal,
            almond: self.almond,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    /// Number of fill-in edges.
    Fill,
    /// Total clique table size.
    Weight,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    #[value(name = "theorem1")]
    MaxWeightTrees,
    #[value(name = "theorem2")]
    CheapestTree,
    #[value(name = "corollary1")]
    SeparatorMultisets,
    #[value(name = "example1")]
    CycleCounterexample,
    Propagation,
    Almond,
    Triangulation,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::MaxWeightTrees => vec![Suite::MaxWeightTrees],
            SuiteArg::CheapestTree => vec![Suite::CheapestTree],
            SuiteArg::SeparatorMultisets => vec![Suite::SeparatorMultisets],
            SuiteArg::CycleCounterexample => vec![Suite::CycleCounterexample],
            SuiteArg::Propagation => vec![Suite::Propagation],
            SuiteArg::Almond => vec![Suite::Almond],
            SuiteArg::Triangulation => vec![Suite::Triangulation],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let code = match e {
            ModelError::Parse { .. } => 2,
            ModelError::Semantic { .. } => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e == Error::ImpossibleEvidence { 4 } else { 3 };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn load(path: &Path) -> Result<Model, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    text.parse::<Model>().map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn render_compile(r: &CompilationReport) -> String {
    let set = |v: &[String]| format!("{{{}}}", v.join(","));
    let mut out = String::new();
    let _ = writeln!(out, "variables: {}", r.variables);
    let _ = writeln!(out, "elimination order: {}", r.elimination_order.join(" "));
    let fills: Vec<String> = r.fill_ins.iter().map(|(a, b)| format!("{a}-{b}")).collect();
    let _ = writeln!(
        out,
        "fill-ins ({}):{}",
        fills.len(),
        fills.iter().map(|f| format!(" {f}")).collect::<String>()
    );
    let _ = writeln!(out, "total clique weight: {}", r.total_clique_weight);
    let _ = writeln!(out, "cliques ({}):", r.cliques.len());
    for c in &r.cliques {
        let _ = writeln!(out, "  {} {} size {}", c.id, set(&c.vars), c.table_size);
    }
    let _ = writeln!(out, "links ({}):", r.links.len());
    for l in &r.links {
        let _ = writeln!(
            out,
            "  {}-{} {} cost {}",
            l.cliques.0,
            l.cliques.1,
            set(&l.separator),
            l.cost
        );
    }
    let _ = writeln!(out, "separators:");
    for s in &r.separators {
        let _ = writeln!(out, "  {} x{}", set(&s.vars), s.multiplicity);
    }
    let _ = writeln!(out, "tree weight: {}", r.tree_weight);
    let _ = writeln!(out, "tree cost: {}", r.tree_cost);
    let _ = writeln!(
        out,
        "junction tree: {} marginalizations, {} stored separator tables",
        r.junction_budget.marginalizations, r.junction_budget.stored_separator_tables
    );
    if let Some(a) = &r.almond {
        let _ = writeln!(
            out,
            "almond tree: {} marginalizations, {} stored separator tables, {} links, cost {}",
            a.budget.marginalizations, a.budget.stored_separator_tables, a.links, a.total_cost
        );
        for s in &a.separator_nodes {
            let _ = writeln!(
                out,
                "  {} x{} neighbours {:?} stores {}",
                set(&s.vars),
                s.multiplicity,
                s.neighbours,
                s.stored_tables
            );
        }
    }
    out
}

fn compile(model: &Path, build: &BuildArgs, emit: Emit) -> Result<String, Failure> {
    let m = load(model)?;
    let c = compile_graph(&m.markov_graph(), build.options())?;
    let r = c.report(&m.universe);
    Ok(match emit {
        Emit::Json => json(&r),
        Emit::Text => render_compile(&r),
    })
}

#[derive(Serialize)]
struct Marginal {
    variable: String,
    /// `(state, probability)` pairs in state order.
    distribution: Vec<(String, f64)>,
}

fn query(
    model: &Path,
    evidence: &[String],
    marginal: &[String],
    build: &BuildArgs,
    emit: Emit,
) -> Result<String, Failure> {
    let m = load(model)?;
    let ev = m.parse_evidence(evidence)?;
    let vars = if marginal.is_empty() {
        (0..m.universe.len()).collect()
    } else {
        marginal
            .iter()
            .map(|n| m.variable(n))
            .collect::<Result<Vec<_>, _>>()?
    };
    let c = compile_graph(&m.markov_graph(), build.options())?;
    let dists = c.infer(&m.universe, &m.factors, &ev, &vars)?;
    let out: Vec<Marginal> = vars
        .iter()
        .zip(dists)
        .map(|(&v, d)| Marginal {
            variable: m.universe.variables()[v].name.clone(),
            distribution: m.states[v].iter().cloned().zip(d).collect(),
        })
        .collect();
    Ok(match emit {
        Emit::Json => json(&out),
        Emit::Text => out
            .iter()
            .map(|mg| {
                let parts: Vec<String> = mg
                    .distribution
                    .iter()
                    .map(|(s, p)| format!("{s}={p:.9}"))
                    .collect();
                format!("{}: {}\n", mg.variable, parts.join(" "))
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct SuiteJson<'a> {
    suite: Suite,
    seed: u64,
    cases: usize,
    passed: bool,
    notes: &'a [String],
    failures: Vec<FailureJson<'a>>,
}

#[derive(Serialize)]
struct FailureJson<'a> {
    case: usize,
    message: &'a str,
    replay: Option<&'a junctionc::model::ModelFile>,
}

fn render_suite(r: &SuiteReport, verbose: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}: {} ({} cases, seed {})",
        r.suite,
        if r.passed() { "PASS" } else { "FAIL" },
        r.cases,
        r.seed
    );
    if verbose || r.suite == Suite::CycleCounterexample {
        for n in &r.notes {
            let _ = writeln!(out, "  {n}");
        }
    }
    for f in &r.failures {
        let _ = writeln!(out, "  case {} failed: {}", f.case, f.message);
        if let Some(replay) = &f.replay {
            let _ = writeln!(out, "  replay model:");
            for line in replay.to_json().lines() {
                let _ = writeln!(out, "    {line}");
            }
        }
    }
    out
}

fn verify(suite: SuiteArg, seed: u64, cases: usize, verbose: bool, emit: Emit) -> (String, bool) {
    let reports: Vec<SuiteReport> = suite
        .suites()
        .into_iter()
        .map(|s| run_suite(s, seed, cases))
        .collect();
    let ok = reports.iter().all(SuiteReport::passed);
    let text = match emit {
        Emit::Text => reports.iter().map(|r| render_suite(r, verbose)).collect(),
        Emit::Json => json(
            &reports
                .iter()
                .map(|r| SuiteJson {
                    suite: r.suite,
                    seed: r.seed,
                    cases: r.cases,
                    passed: r.passed(),
                    notes: &r.notes,
                    failures: r
                        .failures
                        .iter()
                        .map(|f| FailureJson {
                            case: f.case,
                            message: &f.message,
                            replay: f.replay.as_ref(),
                        })
                        .collect(),
                })
                .collect::<Vec<_>>(),
        ),
    };
    (text, ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compile { model, build, emit } => compile(model, build, *emit),
        Command::Query {
            model,
            evidence,
            marginal,
            build,
            emit,
        } => query(model, evidence, marginal, build, *emit),
        Command::Verify {
            suite,
            seed,
            cases,
            verbose,
            emit,
        } => {
            let (text, ok) = verify(*suite, *seed, *cases, *verbose, *emit);
            print!("{text}");
            return if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
