//! The reachable part of a model, explored eagerly and indexed densely.

use std::collections::{BTreeMap, HashMap};

use super::OracleError;
use crate::cgm::{Action, ModelProvider};
use crate::formula::{Coalition, Formula};

pub struct Arena<'p, P: ModelProvider> {
    pub provider: &'p P,
    pub states: Vec<P::State>,
    index: HashMap<P::State, usize>,
    // [state] -> every global move with its target
    moves: Vec<Vec<(Vec<Action>, usize)>>,
    grouped: HashMap<Coalition, Vec<Vec<Vec<usize>>>>,
}

impl<'p, P: ModelProvider> Arena<'p, P> {
    /// Explores everything reachable from `start`.
    pub fn explore(
        provider: &'p P,
        start: &P::State,
        max_states: usize,
    ) -> Result<Self, OracleError> {
        let k = provider.agent_count();
        let mut arena = Arena {
            provider,
            states: vec![start.clone()],
            index: HashMap::from([(start.clone(), 0)]),
            moves: Vec::new(),
            grouped: HashMap::new(),
        };
        let mut i = 0;
        while i < arena.states.len() {
            let s = arena.states[i].clone();
            let mut per_agent = Vec::with_capacity(k as usize);
            for a in 1..=k {
                let acts = provider.available_actions(a, &s)?;
                if acts.is_empty() {
                    return Err(OracleError::Invalid(format!(
                        "agent {a} has no action at `{}`",
                        provider.state_name(&s)
                    )));
                }
                per_agent.push(acts);
            }
            let mut globals: Vec<Vec<Action>> = vec![Vec::new()];
            for acts in &per_agent {
                globals = globals
                    .into_iter()
                    .flat_map(|g| {
                        acts.iter().map(move |&a| {
                            let mut g = g.clone();
                            g.push(a);
                            g
                        })
                    })
                    .collect();
            }
            let mut row = Vec::with_capacity(globals.len());
            for g in globals {
                let t = provider.out(&s, &g)?;
                let ti = match arena.index.get(&t) {
                    Some(&ti) => ti,
                    None => {
                        if arena.states.len() >= max_states {
                            return Err(OracleError::TooLarge {
                                what: "reachable states",
                                cap: max_states,
                            });
                        }
                        arena.states.push(t.clone());
                        arena.index.insert(t, arena.states.len() - 1);
                        arena.states.len() - 1
                    }
                };
                row.push((g, ti));
            }
            arena.moves.push(row);
            i += 1;
        }
        Ok(arena)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// Targets of each move of `coalition`, per state.
    pub fn by_coalition(
        &mut self,
        coalition: &Coalition,
    ) -> Result<&Vec<Vec<Vec<usize>>>, OracleError> {
        let k = self.provider.agent_count();
        if let Some(&a) = coalition.agents().iter().find(|&&a| a == 0 || a > k) {
            return Err(OracleError::Model(crate::cgm::ModelError::UnknownAgent(a)));
        }
        if !self.grouped.contains_key(coalition) {
            let table = self
                .moves
                .iter()
                .map(|row| {
                    let mut groups: BTreeMap<Vec<Option<Action>>, Vec<usize>> = BTreeMap::new();
                    for (g, t) in row {
                        let key = g
                            .iter()
                            .enumerate()
                            .map(|(i, &a)| coalition.contains(i as u32 + 1).then_some(a))
                            .collect();
                        let targets = groups.entry(key).or_default();
                        if !targets.contains(t) {
                            targets.push(*t);
                        }
                    }
                    groups.into_values().collect()
                })
                .collect();
            self.grouped.insert(coalition.clone(), table);
        }
        Ok(&self.grouped[coalition])
    }

    /// Truth of a literal at every state.
    pub fn literal(&self, f: &Formula) -> Result<Vec<bool>, OracleError> {
        self.states
            .iter()
            .map(|s| {
                Ok(match f {
                    Formula::True => true,
                    Formula::False => false,
                    Formula::Prop(p) => self.provider.holds(s, p)?,
                    Formula::NegProp(p) => !self.provider.holds(s, p)?,
                    _ => unreachable!("not a literal"),
                })
            })
            .collect()
    }
}

/// One controllable-predecessor step at `state`: with `universal` false the
/// coalition has a move all of whose outcomes satisfy `good`; with it true
/// every coalition move has some outcome that does.
pub fn pre(groups: &[Vec<usize>], universal: bool, mut good: impl FnMut(usize) -> bool) -> bool {
    if universal {
        groups.iter().all(|ts| ts.iter().any(|&t| good(t)))
    } else {
        groups.iter().any(|ts| ts.iter().all(|&t| good(t)))
    }
}
