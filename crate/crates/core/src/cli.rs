//! Command line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cgm::{
    ExplicitCgm, ModelError, ModelProvider, RingModel, ROBOTS, SINGLE_LOOP, THREE_STATE, TWO_STATE,
};
use crate::crosscheck::{run_exhaustive, run_seeded, CrossOptions, Report};
use crate::decomposition::{analyze, dec, gamma_components};
use crate::engine::{check, render_clause, CheckError, CheckOptions, CheckResult, CyclePolicy};
use crate::formula::{parse, Formula};
use crate::oracle::eval_state_formula;

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "atlcheck", version, about = "On-the-fly ATL+ model checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide `state |= formula` by proof search.
    Check {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        engine: EngineFlags,
        /// Keep the whole candidate proof (needed for --export).
        #[arg(long)]
        retain_proof: bool,
        #[arg(long, value_enum, requires = "retain_proof")]
        export: Option<Export>,
        /// Write the export here instead of standard output.
        #[arg(long, requires = "export")]
        out: Option<PathBuf>,
    },
    /// Decide `state |= formula` with the global fixpoint evaluator.
    Oracle {
        #[command(flatten)]
        target: Target,
    },
    /// Show the decomposition of a quantified formula.
    Decompose {
        formula: String,
        #[arg(long)]
        subsumption: bool,
    },
    /// Compare proof search and oracle on generated instances.
    Crosscheck {
        /// All models with at most 2 states, agents, actions and propositions.
        #[arg(long, conflicts_with = "seeded", required_unless_present = "seeded")]
        exhaustive: bool,
        /// This many random instances.
        #[arg(long, value_name = "N")]
        seeded: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        /// Run the Tarjan check on every proof.
        #[arg(long)]
        validate_back_edges: bool,
        /// Skip the instances not started after this many seconds.
        #[arg(long, value_name = "SECS")]
        time_limit: Option<u64>,
        #[command(flatten)]
        engine: EngineFlags,
    },
}

#[derive(Args, Debug)]
struct Target {
    /// Model file, or one of robots, two_state, single_loop, three_state,
    /// ring:N.
    model: String,
    state: String,
    formula: String,
}

#[derive(Args, Debug, Clone)]
struct EngineFlags {
    /// Explore every branch even after a failure.
    #[arg(long)]
    no_early_abort: bool,
    #[arg(long, default_value_t = 1_000_000)]
    node_budget: usize,
    /// Drop subsumed clauses in gamma and next expansions.
    #[arg(long)]
    subsumption: bool,
    #[arg(long, value_enum, default_value_t = PolicyArg::Traces)]
    cycle_policy: PolicyArg,
    /// Reuse verdicts of cycle-free subtrees (experimental).
    #[arg(long)]
    memo: bool,
    /// Check internal invariants while searching.
    #[arg(long)]
    verify: bool,
}

impl EngineFlags {
    fn options(&self) -> CheckOptions {
        CheckOptions {
            early_abort: !self.no_early_abort,
            node_budget: self.node_budget,
            subsumption: self.subsumption,
            retain_proof: false,
            cycle_policy: match self.cycle_policy {
                PolicyArg::Traces => CyclePolicy::Traces,
                PolicyArg::EntryUntil => CyclePolicy::EntryUntil,
            },
            memoize: self.memo,
            verify_invariants: self.verify,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PolicyArg {
    Traces,
    EntryUntil,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Export {
    Dot,
    Json,
}

enum Model {
    Explicit(ExplicitCgm),
    Ring(RingModel),
}

fn load_model(source: &str) -> Result<Model, String> {
    let builtin = match source {
        "robots" => Some(ROBOTS),
        "two_state" => Some(TWO_STATE),
        "single_loop" => Some(SINGLE_LOOP),
        "three_state" => Some(THREE_STATE),
        _ => None,
    };
    if let Some(text) = builtin {
        return ExplicitCgm::parse(text)
            .map(Model::Explicit)
            .map_err(|e| e.to_string());
    }
    if let Some(n) = source.strip_prefix("ring:") {
        return match n.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Model::Ring(RingModel::new(n))),
            _ => Err(format!("bad ring size `{n}`")),
        };
    }
    let text = std::fs::read_to_string(source).map_err(|e| format!("{source}: {e}"))?;
    ExplicitCgm::parse(&text)
        .map(Model::Explicit)
        .map_err(|e| format!("{source}: {e}"))
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_TRUE
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

fn usage(msg: impl ToString) -> Failure {
    Failure(EXIT_USAGE, msg.to_string())
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Check {
            target,
            engine,
            retain_proof,
            export,
            out: path,
        } => {
            let mut opts = engine.options();
            opts.retain_proof = retain_proof;
            let formula = parse(&target.formula).map_err(usage)?;
            let result = match load_model(&target.model).map_err(usage)? {
                Model::Explicit(m) => check_on(&m, &target.state, &formula, &opts),
                Model::Ring(m) => check_on(&m, &target.state, &formula, &opts),
            }?;
            report_check(&result, out).map_err(usage)?;
            if let (Some(kind), Some(g)) = (export, &result.proof) {
                let text = match kind {
                    Export::Dot => g.to_dot(),
                    Export::Json => g.to_json(),
                };
                match path {
                    Some(p) => std::fs::write(&p, text)
                        .map_err(|e| usage(format!("{}: {e}", p.display())))?,
                    None => out.write_all(text.as_bytes()).map_err(usage)?,
                }
            }
            Ok(if result.verdict {
                EXIT_TRUE
            } else {
                EXIT_FALSE
            })
        }
        Command::Oracle { target } => {
            let formula = parse(&target.formula).map_err(usage)?;
            let truth = match load_model(&target.model).map_err(usage)? {
                Model::Explicit(m) => oracle_on(&m, &target.state, &formula),
                Model::Ring(m) => oracle_on(&m, &target.state, &formula),
            }?;
            writeln!(out, "{}", if truth { "TRUE" } else { "FALSE" }).map_err(usage)?;
            Ok(if truth { EXIT_TRUE } else { EXIT_FALSE })
        }
        Command::Decompose {
            formula,
            subsumption,
        } => {
            let f = parse(&formula).map_err(usage)?;
            decompose(&f, subsumption, out)?;
            Ok(EXIT_TRUE)
        }
        Command::Crosscheck {
            exhaustive,
            seeded,
            seed,
            workers,
            validate_back_edges,
            time_limit,
            engine,
        } => {
            let mut opts = CrossOptions {
                engine: engine.options(),
                validate_back_edges,
                deadline: time_limit.map(|t| Instant::now() + Duration::from_secs(t)),
                ..CrossOptions::default()
            };
            if let Some(w) = workers {
                opts.workers = w;
            }
            let report = match (exhaustive, seeded) {
                (true, _) => run_exhaustive(seed, &opts),
                (false, Some(n)) => run_seeded(seed, n, &opts),
                (false, None) => return Err(usage("give --exhaustive or --seeded N")),
            }
            .map_err(usage)?;
            report_cross(&report, out).map_err(usage)?;
            Ok(
                if report.disagreed == 0 && report.undecided == 0 && report.skipped == 0 {
                    EXIT_TRUE
                } else {
                    EXIT_FALSE
                },
            )
        }
    }
}

fn model_error(e: ModelError) -> Failure {
    usage(e)
}

fn check_on<P: ModelProvider>(
    model: &P,
    state: &str,
    formula: &Formula,
    opts: &CheckOptions,
) -> Result<CheckResult, Failure> {
    let s = model.find_state(state).map_err(model_error)?;
    check(model, &s, formula, opts).map_err(|e| match e {
        CheckError::BudgetExceeded { .. } => Failure(EXIT_BUDGET, e.to_string()),
        CheckError::Model(m) => model_error(m),
        CheckError::Invariant(_) => usage(e),
    })
}

fn oracle_on<P: ModelProvider>(model: &P, state: &str, formula: &Formula) -> Result<bool, Failure> {
    let s = model.find_state(state).map_err(model_error)?;
    eval_state_formula(model, &s, formula).map_err(usage)
}

fn report_check(r: &CheckResult, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{}", if r.verdict { "TRUE" } else { "FALSE" })?;
    writeln!(out, "nodes: {}", r.stats.nodes)?;
    writeln!(out, "expansions: {}", r.stats.expansions)?;
    writeln!(out, "distinct_clauses: {}", r.stats.distinct_clauses)?;
    writeln!(out, "states_materialized: {}", r.stats.states_materialized)?;
    writeln!(out, "back_edges: {}", r.stats.back_edges)?;
    writeln!(out, "max_depth: {}", r.stats.max_depth)?;
    writeln!(out, "wall_time_ms: {}", r.elapsed.as_millis())?;
    if let Some(w) = &r.witness {
        writeln!(out, "witness_length: {}", w.steps.len())?;
        for step in &w.steps {
            writeln!(
                out,
                "witness: {} {}",
                step.node,
                render_clause(&step.clause)
            )?;
        }
        if let Some(t) = w.back_edge_to {
            writeln!(out, "witness_back_edge_to: {t}")?;
        }
    }
    Ok(())
}

fn report_cross(r: &Report, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "models: {}", r.models)?;
    writeln!(out, "formulas: {}", r.formulas)?;
    writeln!(out, "instances: {}", r.instances)?;
    writeln!(out, "agreed: {}", r.agreed)?;
    writeln!(out, "disagreed: {}", r.disagreed)?;
    writeln!(out, "undecided: {}", r.undecided)?;
    writeln!(out, "budget_exceeded: {}", r.budget_exceeded)?;
    writeln!(out, "invariant_violations: {}", r.invariant_violations)?;
    writeln!(out, "skipped: {}", r.skipped)?;
    writeln!(out, "unentered_components: {}", r.unentered_components)?;
    writeln!(out, "wall_time_ms: {}", r.elapsed.as_millis())?;
    for (tag, n) in &r.coverage {
        writeln!(out, "coverage: {tag} {n}")?;
    }
    for m in &r.mismatches {
        writeln!(
            out,
            "mismatch: {} at {} engine={} oracle={}",
            m.formula, m.state, m.engine, m.oracle
        )?;
        for line in m.model.lines() {
            writeln!(out, "  {line}")?;
        }
    }
    for u in &r.undecided_cases {
        writeln!(
            out,
            "undecided_case: {} at {}: {}",
            u.formula, u.state, u.reason
        )?;
        for line in u.model.lines() {
            writeln!(out, "  {line}")?;
        }
    }
    Ok(())
}

fn decompose(f: &Formula, subsumption: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let Some((_, _, body)) = f.as_quantified() else {
        return Err(usage(format!("`{f}` is not quantified")));
    };
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(usage);
    for pair in dec(body) {
        let future = pair
            .future
            .as_ref()
            .map_or("T".to_string(), ToString::to_string);
        w(
            out,
            format!("dec: <{}, {}>", pair.present_formula(), future),
        )?;
    }
    match gamma_components(f) {
        Ok(components) => {
            for c in components {
                w(out, format!("component: {c}"))?;
            }
            for clause in analyze(f, subsumption).map_err(usage)? {
                let items: Vec<String> = clause.iter().map(ToString::to_string).collect();
                w(out, format!("clause: {{{}}}", items.join(", ")))?;
            }
        }
        Err(e) => w(out, format!("not a gamma formula: {e}"))?,
    }
    Ok(())
}
