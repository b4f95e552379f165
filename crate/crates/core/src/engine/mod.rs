//! On-the-fly proof search.
//!
//! A candidate proof is grown depth first from the clause `{s |- phi}`. A
//! clause is a disjunction of assertions; rules replace it by clauses whose
//! conjunction is equivalent. A branch ends at a true literal, at the empty
//! clause, or at a clause already on the current path. The last case is a
//! cycle and is judged by [`CyclePolicy`].
//!
//! States and formulas are interned; clauses are sorted by interned ids.

mod expand;
mod proof;
mod rules;
mod scc;
mod search;
mod table;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::cgm::{ModelError, ModelProvider};
use crate::formula::{closure, Formula};

pub use proof::{render_clause, ProofGraph, ProofNode, RenderedAssertion, Rule, Verdict};
pub use rules::{
    apply_alpha, apply_beta, apply_gamma, apply_literal_rules, build_next_expansions,
    classify_cycle, select_rule, Assertion, CycleVerdict, LiteralOutcome, RuleChoice,
};
pub use scc::tarjan;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("node budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CyclePolicy {
    /// A cycle succeeds when some chain of assertions around it keeps
    /// regenerating a gamma formula whose body holds on a play that stays in
    /// that loop forever (so a box, not an until).
    #[default]
    Traces,
    /// A cycle fails exactly when every assertion of the clause where it
    /// closes is an until assertion. Cheaper, but accepts some false
    /// formulas, e.g. `<<1>>(G p & F q)` on a single p-state loop.
    EntryUntil,
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    /// Stop at the first failing branch.
    pub early_abort: bool,
    /// Maximum number of proof vertices.
    pub node_budget: usize,
    /// Drop subsumed clauses in gamma and next expansions.
    pub subsumption: bool,
    pub retain_proof: bool,
    pub cycle_policy: CyclePolicy,
    /// Reuse the verdict of a clause whose subtree closed all of its cycles
    /// internally. Experimental.
    pub memoize: bool,
    /// Check closure membership, path uniqueness and the clause bound.
    pub verify_invariants: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            early_abort: true,
            node_budget: 1_000_000,
            subsumption: false,
            retain_proof: false,
            cycle_policy: CyclePolicy::Traces,
            memoize: false,
            verify_invariants: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    /// Proof vertices created, leaves included.
    pub nodes: usize,
    pub expansions: usize,
    pub distinct_clauses: usize,
    pub states_materialized: usize,
    pub back_edges: usize,
    pub max_depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessStep {
    pub node: usize,
    pub clause: Vec<RenderedAssertion>,
}

/// Path from the root to the first failure: either ending in the empty
/// clause, or closing a failing cycle at `back_edge_to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub steps: Vec<WitnessStep>,
    pub back_edge_to: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub verdict: bool,
    pub stats: Stats,
    pub witness: Option<Witness>,
    pub proof: Option<ProofGraph>,
    pub elapsed: Duration,
}

/// Decides `s |= phi` for a state formula in negation normal form.
pub fn check<P: ModelProvider>(
    provider: &P,
    state: &P::State,
    phi: &Formula,
    opts: &CheckOptions,
) -> Result<CheckResult, CheckError> {
    let started = Instant::now();
    let mut table = table::Table::new(provider, opts.subsumption);
    if opts.verify_invariants {
        table.enforce_closure(closure(phi).into_iter().collect::<HashSet<_>>())?;
    }
    let s = table.state(state);
    let f = table.formula(phi)?;
    let out = search::Search::new(&mut table, opts).run((s, f))?;
    Ok(CheckResult {
        verdict: out.verdict,
        stats: out.stats,
        witness: out.witness,
        proof: out.proof,
        elapsed: started.elapsed(),
    })
}
