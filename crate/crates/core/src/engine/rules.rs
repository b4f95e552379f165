//! The proof rules one at a time, over plain states and formulas.
//!
//! These wrap the interned implementation used by the search, so tests can
//! exercise exactly the code the search runs.

use super::expand::{self, ChildClause, Choice};
use super::table::{Asn, Table};
use super::CheckError;
use crate::cgm::ModelProvider;
use crate::formula::Formula;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assertion<S> {
    pub state: S,
    pub formula: Formula,
}

impl<S> Assertion<S> {
    pub fn new(state: S, formula: Formula) -> Self {
        Assertion { state, formula }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiteralOutcome<S> {
    /// Some literal holds: the clause is a `T` leaf.
    TrueLeaf,
    /// The clause without its (false) literals.
    Reduced(Vec<Assertion<S>>),
    /// The clause has no literals.
    NoLiterals,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleChoice<S> {
    True,
    False,
    Complex(Assertion<S>),
    Next,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleVerdict {
    Success,
    Failure,
}

fn intern<P: ModelProvider>(
    table: &mut Table<'_, P>,
    clause: &[Assertion<P::State>],
) -> Result<Vec<Asn>, CheckError> {
    let mut out = Vec::with_capacity(clause.len());
    for a in clause {
        out.push((table.state(&a.state), table.formula(&a.formula)?));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn locate<P: ModelProvider>(
    table: &Table<'_, P>,
    clause: &[Asn],
    principal: &Assertion<P::State>,
) -> Result<usize, CheckError> {
    let s = table.lookup_state(&principal.state);
    let f = table.lookup_formula(&principal.formula);
    clause
        .iter()
        .position(|a| Some(a.0) == s && Some(a.1) == f)
        .ok_or_else(|| CheckError::Invariant("principal is not in the clause".into()))
}

fn export<P: ModelProvider>(table: &Table<'_, P>, c: &ChildClause) -> Vec<Assertion<P::State>> {
    c.asns
        .iter()
        .map(|&(s, f)| Assertion::new(table.states[s as usize].clone(), table.get(f).clone()))
        .collect()
}

pub fn apply_literal_rules<P: ModelProvider>(
    provider: &P,
    clause: &[Assertion<P::State>],
) -> Result<LiteralOutcome<P::State>, CheckError> {
    let mut table = Table::new(provider, false);
    let asns = intern(&mut table, clause)?;
    Ok(match expand::select(&mut table, &asns, &[])? {
        Choice::True => LiteralOutcome::TrueLeaf,
        Choice::False => {
            LiteralOutcome::Reduced(export(&table, &expand::drop_literals(&table, &asns)))
        }
        _ => LiteralOutcome::NoLiterals,
    })
}

fn apply_complex<P: ModelProvider>(
    provider: &P,
    clause: &[Assertion<P::State>],
    principal: &Assertion<P::State>,
    subsumption: bool,
) -> Result<(super::Rule, Vec<Vec<Assertion<P::State>>>), CheckError> {
    let mut table = Table::new(provider, subsumption);
    let asns = intern(&mut table, clause)?;
    let p = locate(&table, &asns, principal)?;
    let (rule, children) = expand::complex(&mut table, &asns, p)?;
    Ok((rule, children.iter().map(|c| export(&table, c)).collect()))
}

/// Both children of a conjunction.
pub fn apply_alpha<P: ModelProvider>(
    provider: &P,
    clause: &[Assertion<P::State>],
    principal: &Assertion<P::State>,
) -> Result<[Vec<Assertion<P::State>>; 2], CheckError> {
    match apply_complex(provider, clause, principal, false)? {
        (super::Rule::Alpha, mut cs) => {
            let b = cs.pop().expect("two children");
            let a = cs.pop().expect("two children");
            Ok([a, b])
        }
        _ => Err(CheckError::Invariant(format!(
            "`{}` is not a conjunction",
            principal.formula
        ))),
    }
}

/// The single child of a disjunction.
pub fn apply_beta<P: ModelProvider>(
    provider: &P,
    clause: &[Assertion<P::State>],
    principal: &Assertion<P::State>,
) -> Result<Vec<Assertion<P::State>>, CheckError> {
    match apply_complex(provider, clause, principal, false)? {
        (super::Rule::Beta, mut cs) => Ok(cs.pop().expect("one child")),
        _ => Err(CheckError::Invariant(format!(
            "`{}` is not a disjunction",
            principal.formula
        ))),
    }
}

/// One child per clause of the gamma analysis of the principal.
pub fn apply_gamma<P: ModelProvider>(
    provider: &P,
    clause: &[Assertion<P::State>],
    principal: &Assertion<P::State>,
    subsumption: bool,
) -> Result<Vec<Vec<Assertion<P::State>>>, CheckError> {
    match apply_complex(provider, clause, principal, subsumption)? {
        (super::Rule::Gamma, cs) => Ok(cs),
        _ => Err(CheckError::Invariant(format!(
            "`{}` is not a gamma formula",
            principal.formula
        ))),
    }
}

/// Children of the next rule on a clause of successor assertions only.
pub fn build_next_expansions<P: ModelProvider>(
    provider: &P,
    clause: &[Assertion<P::State>],
    subsumption: bool,
) -> Result<Vec<Vec<Assertion<P::State>>>, CheckError> {
    let mut table = Table::new(provider, subsumption);
    let asns = intern(&mut table, clause)?;
    let children = expand::next(&mut table, &asns, subsumption)?;
    Ok(children.iter().map(|c| export(&table, c)).collect())
}

/// Rule the search would apply to `clause`, given the principals expanded
/// on the path so far (oldest first).
pub fn select_rule<P: ModelProvider>(
    provider: &P,
    clause: &[Assertion<P::State>],
    history: &[Assertion<P::State>],
) -> Result<RuleChoice<P::State>, CheckError> {
    let mut table = Table::new(provider, false);
    let asns = intern(&mut table, clause)?;
    let mut past = Vec::with_capacity(history.len());
    for a in history {
        past.push(Some((table.state(&a.state), table.formula(&a.formula)?)));
    }
    Ok(match expand::select(&mut table, &asns, &past)? {
        Choice::True => RuleChoice::True,
        Choice::False => RuleChoice::False,
        Choice::Complex(i) => {
            let (s, f) = asns[i];
            RuleChoice::Complex(Assertion::new(
                table.states[s as usize].clone(),
                table.get(f).clone(),
            ))
        }
        Choice::Next => RuleChoice::Next,
    })
}

/// Classification by the clause where a cycle closes alone: failure iff
/// all of its assertions are until assertions. This is the
/// [`super::CyclePolicy::EntryUntil`] rule.
pub fn classify_cycle<S>(entry: &[Assertion<S>]) -> CycleVerdict {
    if entry.iter().all(|a| a.formula.is_until_assertion()) {
        CycleVerdict::Failure
    } else {
        CycleVerdict::Success
    }
}
