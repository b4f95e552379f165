//! Interned states and formulas, with per-formula facts cached.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use super::CheckError;
use crate::cgm::{coalition_moves, out_set, ModelProvider};
use crate::decomposition::analyze;
use crate::formula::{classify, Coalition, Formula, FormulaKind, Quant};

pub type StateId = u32;
pub type FormulaId = u32;
/// `(state, formula)`; clauses are sorted vectors of these.
pub type Asn = (StateId, FormulaId);

#[derive(Clone, Debug)]
pub enum Kind {
    Literal,
    Alpha(FormulaId, FormulaId),
    Beta(FormulaId, FormulaId),
    Successor {
        universal: bool,
        coalition: Coalition,
        next: FormulaId,
    },
    Gamma {
        analysis: Option<Rc<Vec<Vec<FormulaId>>>>,
        limit_holds: bool,
    },
}

pub struct Entry {
    pub formula: Formula,
    pub kind: Kind,
}

pub struct Table<'p, P: ModelProvider> {
    pub provider: &'p P,
    pub states: Vec<P::State>,
    state_ix: HashMap<P::State, StateId>,
    pub formulas: Vec<Entry>,
    formula_ix: HashMap<Formula, FormulaId>,
    literals: HashMap<Asn, bool>,
    // (state, coalition) -> successor states of each coalition move
    moves: HashMap<(StateId, Coalition), Rc<Vec<Vec<StateId>>>>,
    subsumption: bool,
    closure: Option<HashSet<Formula>>,
}

impl<'p, P: ModelProvider> Table<'p, P> {
    pub fn new(provider: &'p P, subsumption: bool) -> Self {
        Table {
            provider,
            states: Vec::new(),
            state_ix: HashMap::new(),
            formulas: Vec::new(),
            formula_ix: HashMap::new(),
            literals: HashMap::new(),
            moves: HashMap::new(),
            subsumption,
            closure: None,
        }
    }

    /// From now on every newly interned formula must belong to `closure`.
    pub fn enforce_closure(&mut self, closure: HashSet<Formula>) -> Result<(), CheckError> {
        for e in &self.formulas {
            if !closure.contains(&e.formula) {
                return Err(CheckError::Invariant(format!(
                    "`{}` outside the closure",
                    e.formula
                )));
            }
        }
        self.closure = Some(closure);
        Ok(())
    }

    pub fn state(&mut self, s: &P::State) -> StateId {
        if let Some(&id) = self.state_ix.get(s) {
            return id;
        }
        let id = self.states.len() as StateId;
        self.states.push(s.clone());
        self.state_ix.insert(s.clone(), id);
        id
    }

    pub fn formula(&mut self, f: &Formula) -> Result<FormulaId, CheckError> {
        if let Some(&id) = self.formula_ix.get(f) {
            return Ok(id);
        }
        if let Some(cl) = &self.closure {
            if !cl.contains(f) {
                return Err(CheckError::Invariant(format!("`{f}` outside the closure")));
            }
        }
        let kind = match classify(f) {
            FormulaKind::Literal => Kind::Literal,
            FormulaKind::Alpha(a, b) => Kind::Alpha(self.formula(a)?, self.formula(b)?),
            FormulaKind::Beta(a, b) => Kind::Beta(self.formula(a)?, self.formula(b)?),
            FormulaKind::PrimitiveSuccessor {
                quant,
                coalition,
                successor,
            } => Kind::Successor {
                universal: quant == Quant::Univ,
                coalition: coalition.clone(),
                next: self.formula(successor)?,
            },
            FormulaKind::Gamma { body, .. } => Kind::Gamma {
                analysis: None,
                limit_holds: body.holds_in_limit(),
            },
        };
        let id = self.formulas.len() as FormulaId;
        self.formulas.push(Entry {
            formula: f.clone(),
            kind,
        });
        self.formula_ix.insert(f.clone(), id);
        Ok(id)
    }

    pub fn kind(&self, f: FormulaId) -> &Kind {
        &self.formulas[f as usize].kind
    }

    pub fn get(&self, f: FormulaId) -> &Formula {
        &self.formulas[f as usize].formula
    }

    pub fn lookup_state(&self, s: &P::State) -> Option<StateId> {
        self.state_ix.get(s).copied()
    }

    pub fn lookup_formula(&self, f: &Formula) -> Option<FormulaId> {
        self.formula_ix.get(f).copied()
    }

    /// Clauses of the gamma analysis of `f`, computed once.
    pub fn analysis(&mut self, f: FormulaId) -> Result<Rc<Vec<Vec<FormulaId>>>, CheckError> {
        if let Kind::Gamma {
            analysis: Some(a), ..
        } = self.kind(f)
        {
            return Ok(a.clone());
        }
        let formula = self.get(f).clone();
        let clauses = analyze(&formula, self.subsumption)
            .map_err(|e| CheckError::Invariant(e.to_string()))?;
        let mut ids = Vec::with_capacity(clauses.len());
        for c in clauses {
            ids.push(
                c.iter()
                    .map(|g| self.formula(g))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        let ids = Rc::new(ids);
        if let Kind::Gamma { analysis, .. } = &mut self.formulas[f as usize].kind {
            *analysis = Some(ids.clone());
        }
        Ok(ids)
    }

    pub fn literal_holds(&mut self, a: Asn) -> Result<bool, CheckError> {
        if let Some(&b) = self.literals.get(&a) {
            return Ok(b);
        }
        let s = &self.states[a.0 as usize];
        let b = match self.get(a.1) {
            Formula::True => true,
            Formula::False => false,
            Formula::Prop(p) => self.provider.holds(s, p)?,
            Formula::NegProp(p) => !self.provider.holds(s, p)?,
            other => return Err(CheckError::Invariant(format!("`{other}` is not a literal"))),
        };
        self.literals.insert(a, b);
        Ok(b)
    }

    /// For every move of `coalition` at `s`, the states it may lead to.
    pub fn moves(
        &mut self,
        s: StateId,
        coalition: &Coalition,
    ) -> Result<Rc<Vec<Vec<StateId>>>, CheckError> {
        let key = (s, coalition.clone());
        if let Some(m) = self.moves.get(&key) {
            return Ok(m.clone());
        }
        let state = self.states[s as usize].clone();
        let mut out = Vec::new();
        for mv in coalition_moves(self.provider, &state, coalition)? {
            let targets = out_set(self.provider, &state, &mv)?;
            out.push(targets.iter().map(|t| self.state(t)).collect());
        }
        let out = Rc::new(out);
        self.moves.insert(key, out.clone());
        Ok(out)
    }

    pub fn state_name(&self, s: StateId) -> String {
        self.provider.state_name(&self.states[s as usize])
    }
}
