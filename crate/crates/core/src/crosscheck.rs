//! Engine against oracle on generated models and formulas.

use std::collections::BTreeMap;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cgm::{ExplicitCgm, ModelProvider};
use crate::engine::{check, CheckError, CheckOptions};
use crate::formula::Formula;
use crate::oracle::generate::{
    exhaustive_models, productions, random_formula, random_model, sample_formulas, shape_corpus,
    FormulaBounds, GenerateError, ModelBounds,
};
use crate::oracle::Evaluator;

/// Models with at most two states, agents, actions and propositions.
pub const EXHAUSTIVE_MODELS: ModelBounds = ModelBounds {
    max_states: 2,
    max_agents: 2,
    max_actions: 2,
    props: 2,
};

/// Random formulas added to the hand-picked shapes for the exhaustive run.
pub const EXHAUSTIVE_SAMPLES: usize = 40;
pub const EXHAUSTIVE_MAX_SIZE: usize = 9;

pub const RANDOM_MODELS: ModelBounds = ModelBounds {
    max_states: 4,
    max_agents: 2,
    max_actions: 3,
    props: 2,
};
pub const RANDOM_MAX_SIZE: usize = 13;

#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub model: String,
    pub state: String,
    pub formula: String,
    pub engine: bool,
    pub oracle: bool,
}

/// An instance without a verdict from one of the two sides.
#[derive(Clone, Debug, Serialize)]
pub struct Undecided {
    pub model: String,
    pub state: String,
    pub formula: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub models: usize,
    pub formulas: usize,
    pub instances: usize,
    pub agreed: usize,
    pub disagreed: usize,
    /// The first few disagreements.
    pub mismatches: Vec<Mismatch>,
    /// Instances either side could not decide.
    pub undecided: usize,
    /// Engine runs stopped by the node budget (counted in `undecided`).
    pub budget_exceeded: usize,
    /// Engine runs that broke an internal invariant (counted in `undecided`).
    pub invariant_violations: usize,
    /// The first few undecided instances.
    pub undecided_cases: Vec<Undecided>,
    /// Instances left unchecked because the deadline passed.
    pub skipped: usize,
    /// Instances whose proof had a cyclic component no back edge enters.
    pub unentered_components: usize,
    /// Grammar productions exercised, with the number of formulas using each.
    pub coverage: BTreeMap<String, usize>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct CrossOptions {
    pub engine: CheckOptions,
    pub workers: usize,
    /// Retain proofs and run the Tarjan check on each one (slower).
    pub validate_back_edges: bool,
    /// Stop collecting mismatches and undecided cases after this many.
    pub max_mismatches: usize,
    /// Instances not started by this time are counted in `skipped`.
    pub deadline: Option<Instant>,
}

impl Default for CrossOptions {
    fn default() -> Self {
        CrossOptions {
            engine: CheckOptions::default(),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            validate_back_edges: false,
            max_mismatches: 20,
            deadline: None,
        }
    }
}

/// The formula corpus of the exhaustive run.
pub fn exhaustive_formulas(seed: u64) -> Result<Vec<Formula>, GenerateError> {
    let bounds = FormulaBounds {
        agents: EXHAUSTIVE_MODELS.max_agents,
        props: EXHAUSTIVE_MODELS.props,
        max_size: EXHAUSTIVE_MAX_SIZE,
    };
    let mut out = shape_corpus(&bounds)?;
    for f in sample_formulas(seed, &bounds, EXHAUSTIVE_SAMPLES)? {
        if !out.contains(&f) {
            out.push(f);
        }
    }
    Ok(out)
}

/// Every model within [`EXHAUSTIVE_MODELS`], every state, every formula of
/// [`exhaustive_formulas`] that only names agents of the model.
pub fn run_exhaustive(seed: u64, opts: &CrossOptions) -> Result<Report, GenerateError> {
    let started = Instant::now();
    let models = exhaustive_models(EXHAUSTIVE_MODELS)?;
    let formulas = exhaustive_formulas(seed)?;
    let jobs: Vec<Job> = models
        .iter()
        .enumerate()
        .map(|(i, m)| Job {
            model: i,
            formulas: (0..formulas.len())
                .filter(|&j| formulas[j].max_agent().unwrap_or(0) <= m.agent_count())
                .collect(),
            start: None,
        })
        .collect();
    let mut report = run_jobs(&models, &formulas, &jobs, opts);
    report.models = models.len();
    report.formulas = formulas.len();
    report.coverage = coverage(&formulas);
    report.elapsed = started.elapsed();
    Ok(report)
}

/// `count` random instances: a model within [`RANDOM_MODELS`], one of its
/// states and a formula of size at most [`RANDOM_MAX_SIZE`] over its agents.
pub fn run_seeded(seed: u64, count: usize, opts: &CrossOptions) -> Result<Report, GenerateError> {
    let started = Instant::now();
    let mut models = Vec::with_capacity(count);
    let mut formulas = Vec::with_capacity(count);
    let mut jobs = Vec::with_capacity(count);
    for (i, (m, s, f)) in seeded_instances(seed, count)?.into_iter().enumerate() {
        formulas.push(f);
        jobs.push(Job {
            model: i,
            formulas: vec![i],
            start: Some(s),
        });
        models.push(m);
    }
    let mut report = run_jobs(&models, &formulas, &jobs, opts);
    report.models = count;
    report.formulas = count;
    report.coverage = coverage(&formulas);
    report.elapsed = started.elapsed();
    Ok(report)
}

/// The instances of [`run_seeded`]: model, start state and formula.
pub fn seeded_instances(
    seed: u64,
    count: usize,
) -> Result<Vec<(ExplicitCgm, usize, Formula)>, GenerateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let m = random_model(&mut rng, RANDOM_MODELS)?;
        let bounds = FormulaBounds {
            agents: m.agent_count(),
            props: RANDOM_MODELS.props,
            max_size: RANDOM_MAX_SIZE,
        };
        let f = random_formula(&mut rng, &bounds)?;
        let s = rng.gen_range(0..m.state_count());
        out.push((m, s, f));
    }
    Ok(out)
}

fn coverage(formulas: &[Formula]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for f in formulas {
        for p in productions(f) {
            *out.entry(p.to_string()).or_insert(0) += 1;
        }
    }
    out
}

struct Job {
    model: usize,
    formulas: Vec<usize>,
    /// Check only this state; all states when `None`.
    start: Option<usize>,
}

fn run_jobs(
    models: &[ExplicitCgm],
    formulas: &[Formula],
    jobs: &[Job],
    opts: &CrossOptions,
) -> Report {
    let shared = Mutex::new(Report::default());
    let workers = opts.workers.max(1);
    std::thread::scope(|scope| {
        for w in 0..workers {
            let shared = &shared;
            scope.spawn(move || {
                let mut local = Report::default();
                for job in jobs.iter().skip(w).step_by(workers) {
                    let fs = job.formulas.iter().map(|&j| &formulas[j]);
                    run_model(&models[job.model], job.start, fs, opts, &mut local);
                }
                let mut r = shared.lock().expect("report lock");
                r.instances += local.instances;
                r.agreed += local.agreed;
                r.disagreed += local.disagreed;
                r.undecided += local.undecided;
                r.skipped += local.skipped;
                r.budget_exceeded += local.budget_exceeded;
                r.invariant_violations += local.invariant_violations;
                r.undecided_cases.extend(local.undecided_cases);
                r.unentered_components += local.unentered_components;
                r.mismatches.extend(local.mismatches);
            });
        }
    });
    let mut r = shared.into_inner().expect("report lock");
    // workers finish in any order
    r.mismatches
        .sort_by(|a, b| (&a.model, &a.state, &a.formula).cmp(&(&b.model, &b.state, &b.formula)));
    r.mismatches.truncate(opts.max_mismatches);
    r.undecided_cases
        .sort_by(|a, b| (&a.model, &a.state, &a.formula).cmp(&(&b.model, &b.state, &b.formula)));
    r.undecided_cases.truncate(opts.max_mismatches);
    r
}

fn run_model<'f>(
    m: &ExplicitCgm,
    start: Option<usize>,
    formulas: impl Iterator<Item = &'f Formula> + Clone,
    opts: &CrossOptions,
    out: &mut Report,
) {
    if let Some(s) = start {
        match Evaluator::new(&m, &s, Default::default()) {
            Ok(oracle) => run_from(m, oracle, &[s], formulas, opts, out),
            Err(e) => {
                for f in formulas {
                    undecided(out, opts, m, s, f, format!("oracle: {e}"));
                }
            }
        }
        return;
    }
    // One oracle per start state not reachable from an earlier one.
    let mut covered = vec![false; m.state_count()];
    for start in m.states() {
        if covered[start] {
            continue;
        }
        let oracle = match Evaluator::new(&m, &start, Default::default()) {
            Ok(oracle) => oracle,
            Err(e) => {
                for f in formulas.clone() {
                    undecided(out, opts, m, start, f, format!("oracle: {e}"));
                }
                continue;
            }
        };
        let fresh: Vec<usize> = oracle
            .states()
            .iter()
            .copied()
            .filter(|&s| !covered[s])
            .collect();
        for &s in &fresh {
            covered[s] = true;
        }
        run_from(m, oracle, &fresh, formulas.clone(), opts, out);
    }
}

fn run_from<'f>(
    m: &ExplicitCgm,
    mut oracle: Evaluator<'_, &ExplicitCgm>,
    targets: &[usize],
    formulas: impl Iterator<Item = &'f Formula>,
    opts: &CrossOptions,
    out: &mut Report,
) {
    let mut engine_opts = opts.engine.clone();
    engine_opts.retain_proof |= opts.validate_back_edges;
    let reachable = oracle.states().to_vec();
    for f in formulas {
        if opts.deadline.is_some_and(|d| Instant::now() >= d) {
            out.skipped += targets.len();
            continue;
        }
        let truth = match oracle.eval(f) {
            Ok(truth) => truth,
            Err(e) => {
                for &s in targets {
                    undecided(out, opts, m, s, f, format!("oracle: {e}"));
                }
                continue;
            }
        };
        for (i, s) in reachable.iter().enumerate() {
            if !targets.contains(s) {
                continue;
            }
            out.instances += 1;
            match check(m, s, f, &engine_opts) {
                Ok(r) => {
                    if let Some(g) = &r.proof {
                        if opts.validate_back_edges && !g.unentered_components().is_empty() {
                            out.unentered_components += 1;
                        }
                    }
                    if r.verdict == truth[i] {
                        out.agreed += 1;
                        continue;
                    }
                    out.disagreed += 1;
                    if out.mismatches.len() < opts.max_mismatches {
                        out.mismatches.push(Mismatch {
                            model: m.to_text(),
                            state: m.state_name(s),
                            formula: f.to_string(),
                            engine: r.verdict,
                            oracle: truth[i],
                        });
                    }
                }
                Err(e) => {
                    match e {
                        CheckError::BudgetExceeded { .. } => out.budget_exceeded += 1,
                        CheckError::Invariant(_) => out.invariant_violations += 1,
                        CheckError::Model(_) => {}
                    }
                    undecided(out, opts, m, *s, f, e.to_string());
                }
            }
        }
    }
}

fn undecided(
    out: &mut Report,
    opts: &CrossOptions,
    m: &ExplicitCgm,
    s: usize,
    f: &Formula,
    reason: String,
) {
    out.undecided += 1;
    if out.undecided_cases.len() < opts.max_mismatches {
        out.undecided_cases.push(Undecided {
            model: m.to_text(),
            state: m.state_name(&s),
            formula: f.to_string(),
            reason,
        });
    }
}
