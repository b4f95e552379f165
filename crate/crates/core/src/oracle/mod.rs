//! Global, fixpoint-based evaluation of ATL+ formulas.
//!
//! This is deliberately unrelated to the proof search in [`crate::engine`]:
//! it explores the whole reachable model and computes truth sets bottom-up.
//! Quantifiers over a single temporal operator use the textbook
//! controllable-predecessor fixpoints. Boolean combinations of temporal
//! operators are solved on a product of model states with per-operator
//! status flags.

mod arena;
mod game;
pub mod generate;

use std::collections::HashMap;

use thiserror::Error;

use crate::cgm::{ModelError, ModelProvider};
use crate::formula::{Coalition, Formula, PathFormula, Quant};

use arena::{pre, Arena};

pub use game::{Objective, Status, StatusVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{what} exceed the cap of {cap}")]
    TooLarge { what: &'static str, cap: usize },
    #[error("body `{0}` is not a single temporal operator")]
    NotVanilla(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug)]
pub struct OracleLimits {
    pub max_states: usize,
    pub max_game_nodes: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_states: 100_000,
            max_game_nodes: 4_000_000,
        }
    }
}

/// Truth of `f` at `s`.
pub fn eval_state_formula<P: ModelProvider>(
    provider: &P,
    s: &P::State,
    f: &Formula,
) -> Result<bool, OracleError> {
    let mut ev = Evaluator::new(provider, s, OracleLimits::default())?;
    Ok(ev.eval(f)?[0])
}

/// Truth of `Q<A> body` at `s` where the body is one temporal operator (or a
/// plain state formula), by the classic fixpoints.
pub fn eval_vanilla<P: ModelProvider>(
    provider: &P,
    s: &P::State,
    quant: Quant,
    coalition: &Coalition,
    body: &PathFormula,
) -> Result<bool, OracleError> {
    let mut ev = Evaluator::new(provider, s, OracleLimits::default())?;
    Ok(ev.vanilla(quant, coalition, body)?[0])
}

/// Truth of `Q<A> body` at `s` for any ATL+ body, on the status product.
pub fn eval_game<P: ModelProvider>(
    provider: &P,
    s: &P::State,
    quant: Quant,
    coalition: &Coalition,
    body: &PathFormula,
) -> Result<bool, OracleError> {
    let mut ev = Evaluator::new(provider, s, OracleLimits::default())?;
    Ok(ev.game(quant, coalition, body)?[0])
}

/// Evaluates formulas over everything reachable from one start state. Truth
/// vectors are indexed like [`Evaluator::states`], with the start at 0.
pub struct Evaluator<'p, P: ModelProvider> {
    arena: Arena<'p, P>,
    limits: OracleLimits,
    memo: HashMap<Formula, Vec<bool>>,
}

impl<'p, P: ModelProvider> Evaluator<'p, P> {
    pub fn new(
        provider: &'p P,
        start: &P::State,
        limits: OracleLimits,
    ) -> Result<Self, OracleError> {
        Ok(Evaluator {
            arena: Arena::explore(provider, start, limits.max_states)?,
            limits,
            memo: HashMap::new(),
        })
    }

    pub fn states(&self) -> &[P::State] {
        &self.arena.states
    }

    pub fn eval(&mut self, f: &Formula) -> Result<Vec<bool>, OracleError> {
        if let Some(v) = self.memo.get(f) {
            return Ok(v.clone());
        }
        let v = match f {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::NegProp(_) => {
                self.arena.literal(f)?
            }
            Formula::And(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                x.iter().zip(&y).map(|(a, b)| *a && *b).collect()
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                x.iter().zip(&y).map(|(a, b)| *a || *b).collect()
            }
            Formula::Exist(c, body) | Formula::Univ(c, body) => {
                let quant = if matches!(f, Formula::Exist(..)) {
                    Quant::Exist
                } else {
                    Quant::Univ
                };
                match body.as_ref() {
                    PathFormula::And(..) | PathFormula::Or(..) => self.game(quant, c, body)?,
                    _ => self.vanilla(quant, c, body)?,
                }
            }
        };
        self.memo.insert(f.clone(), v.clone());
        Ok(v)
    }

    pub fn vanilla(
        &mut self,
        quant: Quant,
        coalition: &Coalition,
        body: &PathFormula,
    ) -> Result<Vec<bool>, OracleError> {
        let universal = quant == Quant::Univ;
        let n = self.arena.len();
        match body {
            PathFormula::State(f) => {
                // Still validate the coalition against the model.
                self.arena.by_coalition(coalition)?;
                self.eval(f)
            }
            PathFormula::Next(f) => {
                let target = self.eval(f)?;
                let groups = self.arena.by_coalition(coalition)?;
                Ok((0..n)
                    .map(|s| pre(&groups[s], universal, |t| target[t]))
                    .collect())
            }
            PathFormula::Always(f) => {
                let inv = self.eval(f)?;
                let groups = self.arena.by_coalition(coalition)?;
                let mut z = inv.clone();
                loop {
                    let next: Vec<bool> = (0..n)
                        .map(|s| inv[s] && pre(&groups[s], universal, |t| z[t]))
                        .collect();
                    if next == z {
                        return Ok(z);
                    }
                    z = next;
                }
            }
            PathFormula::Until(a, b) => {
                let (hold, goal) = (self.eval(a)?, self.eval(b)?);
                let groups = self.arena.by_coalition(coalition)?;
                let mut z = goal.clone();
                loop {
                    let next: Vec<bool> = (0..n)
                        .map(|s| goal[s] || (hold[s] && pre(&groups[s], universal, |t| z[t])))
                        .collect();
                    if next == z {
                        return Ok(z);
                    }
                    z = next;
                }
            }
            PathFormula::And(..) | PathFormula::Or(..) => {
                Err(OracleError::NotVanilla(body.to_string()))
            }
        }
    }

    pub fn game(
        &mut self,
        quant: Quant,
        coalition: &Coalition,
        body: &PathFormula,
    ) -> Result<Vec<bool>, OracleError> {
        let mut atoms = Vec::new();
        let objective = Objective::build(body, &mut atoms);
        let mut evaluated = Vec::with_capacity(atoms.len());
        for atom in &atoms {
            evaluated.push(game::AtomTruth::evaluate(atom, |f| self.eval(f))?);
        }
        let groups = self.arena.by_coalition(coalition)?.clone();
        game::solve(
            &groups,
            quant == Quant::Univ,
            &objective,
            &evaluated,
            self.limits.max_game_nodes,
        )
    }
}
