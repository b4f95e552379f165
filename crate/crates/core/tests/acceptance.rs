//! Acceptance run: one PASS or FAIL line per criterion, then a non-zero exit
//! status if any criterion failed. Every engine run uses the default options
//! with invariant checking switched on.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use atlcheck::cgm::{
    ExplicitCgm, ModelProvider, RingModel, Tracked, ROBOTS, SINGLE_LOOP, THREE_STATE, TWO_STATE,
};
use atlcheck::crosscheck::{
    exhaustive_formulas, run_exhaustive, run_seeded, seeded_instances, CrossOptions, Report,
    EXHAUSTIVE_MODELS,
};
use atlcheck::decomposition::{analyze, dec, gamma_components};
use atlcheck::engine::{check, CheckError, CheckOptions, CheckResult, Verdict};
use atlcheck::formula::{classify, closure, parse, Formula, FormulaKind};
use atlcheck::oracle::generate::exhaustive_models;
use atlcheck::oracle::Evaluator;
use common::model;

/// Each worked example must finish within this.
const EXAMPLE_LIMIT: Duration = Duration::from_secs(1);
/// Each oracle suite must finish within this.
const SUITE_LIMIT: Duration = Duration::from_secs(600);
const EXHAUSTIVE_MODEL_COUNT: usize = 11416;
const EXHAUSTIVE_SEED: u64 = 7;
const SEEDED_COUNT: usize = 1000;
const SEEDED_SEED: u64 = 1;
/// States a FALSE query on the 100-state ring may materialize.
const RING_STATE_LIMIT: usize = 10;
/// Vertex count given for the three-state example. Compared, not required.
const REPORTED_VERTICES: usize = 46;
/// Seeded instances re-run for the determinism check.
const DETERMINISM_SAMPLE: usize = 200;

fn options() -> CheckOptions {
    CheckOptions {
        verify_invariants: true,
        ..CheckOptions::default()
    }
}

fn full_options() -> CheckOptions {
    CheckOptions {
        early_abort: false,
        retain_proof: true,
        ..options()
    }
}

/// Outcome of every engine run, for the termination criterion.
#[derive(Default)]
struct Tally {
    runs: usize,
    budget: usize,
    invariants: Vec<String>,
}

impl Tally {
    fn run<P: ModelProvider>(
        &mut self,
        m: &P,
        state: &str,
        formula: &str,
        opts: &CheckOptions,
    ) -> Option<CheckResult> {
        let s = m.find_state(state).expect("state exists");
        let f = parse(formula).expect("formula parses");
        self.record(check(m, &s, &f, opts), formula)
    }

    fn record(&mut self, r: Result<CheckResult, CheckError>, what: &str) -> Option<CheckResult> {
        self.runs += 1;
        match r {
            Ok(r) => Some(r),
            Err(CheckError::BudgetExceeded { .. }) => {
                self.budget += 1;
                None
            }
            Err(e) => {
                self.invariants.push(format!("{what}: {e}"));
                None
            }
        }
    }

    fn absorb(&mut self, r: &Report) {
        self.runs += r.instances;
        self.budget += r.budget_exceeded;
        if r.invariant_violations > 0 {
            self.invariants.push(format!(
                "{} invariant violations in a suite",
                r.invariant_violations
            ));
        }
    }
}

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

impl Line {
    fn new(id: &'static str, pass: bool, detail: impl Into<String>) -> Line {
        Line {
            id,
            pass,
            detail: detail.into(),
        }
    }

    fn print(&self) {
        println!(
            "{} {} {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.detail
        );
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let started = Instant::now();
    let out = f();
    (out, started.elapsed())
}

fn verdict(r: &Option<CheckResult>) -> Option<bool> {
    r.as_ref().map(|r| r.verdict)
}

fn example(id: &'static str, elapsed: Duration, ok: bool, detail: String) -> Line {
    let fast = elapsed < EXAMPLE_LIMIT;
    Line::new(
        id,
        ok && fast,
        format!("{detail}; {} ms", elapsed.as_millis()),
    )
}

fn robots(t: &mut Tally) -> Line {
    let m = model(ROBOTS);
    let cases = [
        ("<<1>> X pos2", false),
        ("<<1>> X (pos0 | pos1 | pos2)", true),
        ("<<1,2>> X pos2", true),
    ];
    let (got, elapsed) = timed(|| {
        cases
            .iter()
            .map(|(f, _)| verdict(&t.run(&m, "q0", f, &options())))
            .collect::<Vec<_>>()
    });
    let ok = cases
        .iter()
        .zip(&got)
        .all(|((_, want), got)| *got == Some(*want));
    example("1a", elapsed, ok, format!("verdicts {got:?}"))
}

fn failing_box(t: &mut Tally) -> Line {
    let m = model(TWO_STATE);
    let ((early, full), elapsed) = timed(|| {
        (
            t.run(&m, "s1", "<<1>> G q", &options()),
            t.run(&m, "s1", "<<1>> G q", &full_options()),
        )
    });
    let path: Vec<usize> = early
        .as_ref()
        .and_then(|r| r.witness.as_ref())
        .map(|w| w.steps.iter().map(|s| s.node).collect())
        .unwrap_or_default();
    let ends_empty = early
        .as_ref()
        .and_then(|r| r.witness.as_ref())
        .and_then(|w| w.steps.last())
        .is_some_and(|s| s.clause.is_empty());
    let graph = full.as_ref().and_then(|r| r.proof.as_ref());
    let vertices = graph.map_or(0, |g| g.nodes.len());
    let back = graph.map_or(0, |g| g.back_edge_count());
    let seven_to_one = graph.is_some_and(|g| g.node(7).back_edges == vec![1]);
    let ok = verdict(&early) == Some(false)
        && path == [1, 3, 5, 6, 8]
        && ends_empty
        && vertices == 8
        && back == 1
        && seven_to_one;
    example(
        "1b",
        elapsed,
        ok,
        format!(
            "failure path {path:?}, {vertices} vertices, {back} back edge(s), 7->1 {seven_to_one}"
        ),
    )
}

fn formulas_of(clause: &[atlcheck::engine::RenderedAssertion]) -> Vec<Formula> {
    clause
        .iter()
        .map(|a| parse(&a.formula).expect("rendered formulas reparse"))
        .collect()
}

fn until_loop(t: &mut Tally) -> Line {
    let m = model(SINGLE_LOOP);
    let ((until, always), elapsed) = timed(|| {
        (
            t.run(&m, "s", "<<1>> (p U q)", &options()),
            t.run(&m, "s", "<<1>> G ~q", &options()),
        )
    });
    let entry_all_until = until
        .as_ref()
        .and_then(|r| r.witness.as_ref())
        .and_then(|w| {
            let target = w.back_edge_to?;
            let step = w.steps.iter().find(|s| s.node == target)?;
            Some(
                formulas_of(&step.clause)
                    .iter()
                    .all(Formula::is_until_assertion),
            )
        })
        .unwrap_or(false);
    let ok = verdict(&until) == Some(false) && entry_all_until && verdict(&always) == Some(true);
    example(
        "1c",
        elapsed,
        ok,
        format!(
            "p U q {:?} (entry all until: {entry_all_until}), G ~q {:?}",
            verdict(&until),
            verdict(&always)
        ),
    )
}

fn excluded_middle(t: &mut Tally) -> Line {
    let m = model(SINGLE_LOOP);
    let (r, elapsed) = timed(|| t.run(&m, "s", "<<1>> G p | <<1>> F ~p", &full_options()));
    let box_cycle = r.as_ref().and_then(|r| r.proof.as_ref()).is_some_and(|g| {
        g.nodes.iter().any(|n| {
            n.verdict == Verdict::True
                && n.back_edges
                    .iter()
                    .any(|&t| g.node(t).clause.iter().any(|a| a.formula == "<<1>>G p"))
        })
    });
    let ok = verdict(&r) == Some(true) && box_cycle;
    example(
        "1d",
        elapsed,
        ok,
        format!(
            "verdict {:?}, successful cycle on a clause with <<1>>G p: {box_cycle}",
            verdict(&r)
        ),
    )
}

fn three_state(t: &mut Tally) -> Line {
    let m = model(THREE_STATE);
    let binding = "<<2>> (<<1>> F p) U r";
    let other = "<<2>> (<<1>> p) U r";
    let ((a, b), elapsed) = timed(|| {
        (
            t.run(&m, "A", binding, &full_options()),
            t.run(&m, "A", other, &options()),
        )
    });
    let vertices = a
        .as_ref()
        .and_then(|r| r.proof.as_ref())
        .map_or(0, |g| g.nodes.len());
    let ok = verdict(&a) == Some(false);
    example(
        "1e",
        elapsed,
        ok,
        format!(
            "F-reading {:?}, plain reading {:?}, {vertices} vertices (reported {REPORTED_VERTICES}, not binding)",
            verdict(&a),
            verdict(&b)
        ),
    )
}

fn two_eventualities(t: &mut Tally) -> Line {
    let m = model(SINGLE_LOOP);
    let (r, elapsed) = timed(|| t.run(&m, "s", "<<1>> (F q & F p)", &options()));
    let on_cycle = r
        .as_ref()
        .and_then(|r| r.witness.as_ref())
        .and_then(|w| {
            let target = w.back_edge_to?;
            let start = w.steps.iter().position(|s| s.node == target)?;
            Some(w.steps[start..].iter().any(|step| {
                let texts: Vec<&str> = step.clause.iter().map(|a| a.formula.as_str()).collect();
                texts.contains(&"<<1>>(F q & F p)")
                    && texts.iter().any(|f| *f == "<<1>>F q" || *f == "<<1>>F p")
            }))
        })
        .unwrap_or(false);
    let ok = verdict(&r) == Some(false) && on_cycle;
    example(
        "1f",
        elapsed,
        ok,
        format!(
            "verdict {:?}, root and residual eventuality on the failing cycle: {on_cycle}",
            verdict(&r)
        ),
    )
}

fn suite(id: &'static str, r: &Report, expect_models: Option<usize>) -> Line {
    let models_ok = expect_models.is_none_or(|n| r.models == n);
    let pass = models_ok
        && r.disagreed == 0
        && r.undecided == 0
        && r.skipped == 0
        && r.elapsed <= SUITE_LIMIT;
    let mut detail = format!(
        "{} models, {} formulas, {} instances: {} agreed, {} disagreed, {} undecided ({} over budget), \
         {} not reached in time; {:.1} s",
        r.models,
        r.formulas,
        r.instances,
        r.agreed,
        r.disagreed,
        r.undecided,
        r.budget_exceeded,
        r.skipped,
        r.elapsed.as_secs_f64()
    );
    for m in &r.mismatches {
        detail.push_str(&format!("\n    mismatch: {} at {}", m.formula, m.state));
    }
    for u in &r.undecided_cases {
        detail.push_str(&format!(
            "\n    undecided: {} at {} ({})",
            u.formula, u.state, u.reason
        ));
    }
    Line::new(id, pass, detail)
}

fn disjunction(parts: &[Formula]) -> Formula {
    parts
        .iter()
        .cloned()
        .reduce(Formula::or)
        .unwrap_or(Formula::False)
}

fn conjunction(parts: &[Formula]) -> Formula {
    parts
        .iter()
        .cloned()
        .reduce(Formula::and)
        .unwrap_or(Formula::True)
}

fn decomposition() -> Line {
    let theta = parse("<<1>> (G p | G q)").unwrap();
    let Some((_, _, body)) = theta.as_quantified() else {
        unreachable!()
    };
    let text = |fs: &[Formula]| fs.iter().map(ToString::to_string).collect::<BTreeSet<_>>();
    let pairs: BTreeSet<String> = dec(body)
        .iter()
        .map(|p| format!("{} / {}", p.present_formula(), p.future.as_ref().unwrap()))
        .collect();
    let want_pairs: BTreeSet<String> = ["p / G p", "q / G q", "(p & q) / (G p | G q)"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let comps = text(&gamma_components(&theta).unwrap());
    let want_comps = text(&[
        parse("p & <<1>> X <<1>> G p").unwrap(),
        parse("q & <<1>> X <<1>> G q").unwrap(),
        parse("p & q & <<1>> X <<1>> (G p | G q)").unwrap(),
    ]);
    // Clause form of (p & X1) | (q & X2) | (p & q & X3), one atom per term.
    let clauses: BTreeSet<BTreeSet<String>> = analyze(&theta, false)
        .unwrap()
        .iter()
        .map(|c| text(c))
        .collect();
    let (x1, x2, x3) = (
        "<<1>>X <<1>>G p",
        "<<1>>X <<1>>G q",
        "<<1>>X <<1>>(G p | G q)",
    );
    let mut want_clauses = BTreeSet::new();
    for a in ["p", x1] {
        for b in ["q", x2] {
            for c in ["p", "q", x3] {
                want_clauses.insert(
                    [a, b, c]
                        .iter()
                        .map(|s| s.to_string())
                        .collect::<BTreeSet<_>>(),
                );
            }
        }
    }
    let example_ok = pairs == want_pairs && comps == want_comps && clauses == want_clauses;

    let (equivalence, elapsed) = timed(gamma_equivalence);
    let (gammas, checks, failures) = equivalence;
    let mut detail = format!(
        "worked example {}; {gammas} gamma formulas x exhaustive universe, {checks} checks, {} failures; {:.1} s",
        if example_ok { "matches" } else { "differs" },
        failures.len(),
        elapsed.as_secs_f64()
    );
    for f in failures.iter().take(5) {
        detail.push_str(&format!("\n    {f}"));
    }
    Line::new("3", example_ok && failures.is_empty() && gammas > 0, detail)
}

/// Every gamma formula in the closures of the exhaustive corpus against the
/// disjunction of its components and against its clause form.
fn gamma_equivalence() -> (usize, usize, Vec<String>) {
    let mut gammas: BTreeSet<Formula> = BTreeSet::new();
    for phi in exhaustive_formulas(EXHAUSTIVE_SEED).unwrap() {
        for g in closure(&phi) {
            if matches!(classify(&g), FormulaKind::Gamma { .. }) {
                gammas.insert(g);
            }
        }
    }
    let rewritten: Vec<(Formula, Formula, Formula)> = gammas
        .into_iter()
        .map(|g| {
            let comps = disjunction(&gamma_components(&g).unwrap());
            let clauses: Vec<Formula> = analyze(&g, false)
                .unwrap()
                .iter()
                .map(|c| disjunction(c))
                .collect();
            let cnf = conjunction(&clauses);
            (g, comps, cnf)
        })
        .collect();
    let mut checks = 0;
    let mut failures = Vec::new();
    for m in exhaustive_models(EXHAUSTIVE_MODELS).unwrap() {
        let mut covered = vec![false; m.state_count()];
        for start in m.states() {
            if covered[start] {
                continue;
            }
            let mut oracle = Evaluator::new(&m, &start, Default::default()).unwrap();
            for &s in oracle.states() {
                covered[s] = true;
            }
            for (g, comps, cnf) in &rewritten {
                if g.max_agent().unwrap_or(0) > m.agent_count() {
                    continue;
                }
                checks += 1;
                let want = oracle.eval(g).unwrap();
                if oracle.eval(comps).unwrap() != want || oracle.eval(cnf).unwrap() != want {
                    failures.push(format!("{g} on {}", m.to_text().replace('\n', "; ")));
                }
            }
        }
    }
    (rewritten.len(), checks, failures)
}

fn termination(t: &Tally) -> Line {
    let mut detail = format!(
        "{} runs, {} over the node budget, {} invariant violations (closure, path uniqueness, clause bound)",
        t.runs,
        t.budget,
        t.invariants.len()
    );
    for v in t.invariants.iter().take(5) {
        detail.push_str(&format!("\n    {v}"));
    }
    Line::new("4", t.budget == 0 && t.invariants.is_empty(), detail)
}

fn on_the_fly(t: &mut Tally, instances: &[(ExplicitCgm, usize, Formula)]) -> Vec<Line> {
    let ring = Tracked::new(RingModel::new(100));
    let r = t.run(&ring, "q0", "<<1>> X pos0", &options());
    let states = ring.materialized();
    let ring_line = Line::new(
        "5a",
        verdict(&r) == Some(false) && states <= RING_STATE_LIMIT,
        format!(
            "ring of 100, <<1>> X pos0 at q0: {:?}, {states} states materialized",
            verdict(&r)
        ),
    );

    let full = CheckOptions {
        early_abort: false,
        ..options()
    };
    let (mut compared, mut full_over_budget, mut worse) = (0, 0, Vec::new());
    for (m, s, f) in instances {
        let Ok(early) = check(m, s, f, &options()) else {
            continue;
        };
        if early.verdict {
            continue;
        }
        compared += 1;
        match check(m, s, f, &full) {
            Ok(r) if r.stats.nodes < early.stats.nodes => {
                worse.push(format!("{f}: {} > {}", early.stats.nodes, r.stats.nodes))
            }
            Ok(_) => {}
            // the budget bounds the early run too, so it used fewer nodes
            Err(CheckError::BudgetExceeded { .. }) => full_over_budget += 1,
            Err(e) => worse.push(format!("{f}: {e}")),
        }
    }
    let mut detail = format!(
        "{compared} FALSE seeded instances, {} with more early-abort nodes ({full_over_budget} exhaustive runs hit the budget)",
        worse.len()
    );
    for w in worse.iter().take(5) {
        detail.push_str(&format!("\n    {w}"));
    }
    vec![
        ring_line,
        Line::new("5b", worse.is_empty() && compared > 0, detail),
    ]
}

fn determinism(instances: &[(ExplicitCgm, usize, Formula)]) -> Line {
    let opts = CheckOptions {
        retain_proof: true,
        ..CheckOptions::default()
    };
    let mut cases: Vec<(ExplicitCgm, usize, Formula)> = Vec::new();
    for (text, state, formula) in [
        (ROBOTS, "q0", "<<1>> X pos2"),
        (TWO_STATE, "s1", "<<1>> G q"),
        (SINGLE_LOOP, "s", "<<1>> (F q & F p)"),
        (THREE_STATE, "A", "<<2>> (<<1>> F p) U r"),
    ] {
        let m = model(text);
        let s = m.find_state(state).unwrap();
        cases.push((m, s, parse(formula).unwrap()));
    }
    cases.extend(instances.iter().take(DETERMINISM_SAMPLE).cloned());
    let mut differing = Vec::new();
    let mut compared = 0;
    for (m, s, f) in &cases {
        let a = check(m, s, f, &opts);
        let b = check(m, s, f, &opts);
        let same = match (&a, &b) {
            (Ok(a), Ok(b)) => {
                let (ga, gb) = (a.proof.as_ref().unwrap(), b.proof.as_ref().unwrap());
                a.verdict == b.verdict
                    && a.stats == b.stats
                    && a.witness == b.witness
                    && ga.to_json() == gb.to_json()
                    && ga.to_dot() == gb.to_dot()
            }
            (Err(a), Err(b)) => a == b,
            _ => false,
        };
        compared += 1;
        if !same {
            differing.push(f.to_string());
        }
    }
    Line::new(
        "6",
        differing.is_empty(),
        format!(
            "{compared} instances run twice, {} with differing exports or statistics",
            differing.len()
        ),
    )
}

fn main() -> ExitCode {
    let mut tally = Tally::default();
    let mut lines = vec![
        robots(&mut tally),
        failing_box(&mut tally),
        until_loop(&mut tally),
        excluded_middle(&mut tally),
        three_state(&mut tally),
        two_eventualities(&mut tally),
    ];

    for l in &lines {
        l.print();
    }
    let emit = |lines: &mut Vec<Line>, l: Line| {
        l.print();
        lines.push(l);
    };

    // Instances not started within the limit are skipped and fail the suite.
    let cross = || CrossOptions {
        engine: options(),
        validate_back_edges: false,
        deadline: Some(Instant::now() + SUITE_LIMIT),
        ..CrossOptions::default()
    };
    let exhaustive = run_exhaustive(EXHAUSTIVE_SEED, &cross()).unwrap();
    tally.absorb(&exhaustive);
    emit(
        &mut lines,
        suite("2i", &exhaustive, Some(EXHAUSTIVE_MODEL_COUNT)),
    );
    let seeded = run_seeded(SEEDED_SEED, SEEDED_COUNT, &cross()).unwrap();
    tally.absorb(&seeded);
    emit(&mut lines, suite("2ii", &seeded, None));

    emit(&mut lines, decomposition());
    let instances = seeded_instances(SEEDED_SEED, SEEDED_COUNT).unwrap();
    let fly = on_the_fly(&mut tally, &instances);
    emit(&mut lines, termination(&tally));
    for l in fly {
        emit(&mut lines, l);
    }
    emit(&mut lines, determinism(&instances));

    let failed = lines.iter().filter(|l| !l.pass).count();
    println!(
        "{} of {} criteria passed",
        lines.len() - failed,
        lines.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
