//! Concurrent game models.
//!
//! The checker only talks to a model through [`ModelProvider`], so models can
//! be explicit tables ([`ExplicitCgm`]) or computed on demand ([`RingModel`]).

mod explicit;
mod ring;
mod tracked;

use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::formula::{Agent, Coalition};

pub use explicit::{CgmBuilder, ExplicitCgm};
pub use ring::RingModel;
pub use tracked::Tracked;

/// Actions are small integers whose meaning is up to the provider.
pub type Action = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown agent {0}")]
    UnknownAgent(Agent),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("action {action} is not available to agent {agent} at state `{state}`")]
    ActionUnavailable {
        agent: Agent,
        action: String,
        state: String,
    },
    #[error("move has {got} actions but the model has {want} agents")]
    MoveArity { got: usize, want: usize },
    #[error("no transition from state `{state}` on move ({mv})")]
    MissingTransition { state: String, mv: String },
    #[error("line {line}: {msg}")]
    Load { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

pub trait ModelProvider {
    type State: Clone + Eq + Hash + Debug;

    /// Agents are `1..=agent_count()`.
    fn agent_count(&self) -> u32;

    /// Non-empty set of actions available to `agent` at `state`.
    fn available_actions(
        &self,
        agent: Agent,
        state: &Self::State,
    ) -> Result<Vec<Action>, ModelError>;

    /// Successor of `state` under a global move, one action per agent.
    fn out(&self, state: &Self::State, mv: &[Action]) -> Result<Self::State, ModelError>;

    fn holds(&self, state: &Self::State, prop: &str) -> Result<bool, ModelError>;

    fn state_name(&self, state: &Self::State) -> String;

    fn find_state(&self, name: &str) -> Result<Self::State, ModelError>;

    fn action_name(&self, _agent: Agent, _state: &Self::State, action: Action) -> String {
        action.to_string()
    }

    fn agents(&self) -> Vec<Agent> {
        (1..=self.agent_count()).collect()
    }
}

impl<P: ModelProvider + ?Sized> ModelProvider for &P {
    type State = P::State;

    fn agent_count(&self) -> u32 {
        (**self).agent_count()
    }
    fn available_actions(
        &self,
        agent: Agent,
        state: &Self::State,
    ) -> Result<Vec<Action>, ModelError> {
        (**self).available_actions(agent, state)
    }
    fn out(&self, state: &Self::State, mv: &[Action]) -> Result<Self::State, ModelError> {
        (**self).out(state, mv)
    }
    fn holds(&self, state: &Self::State, prop: &str) -> Result<bool, ModelError> {
        (**self).holds(state, prop)
    }
    fn state_name(&self, state: &Self::State) -> String {
        (**self).state_name(state)
    }
    fn find_state(&self, name: &str) -> Result<Self::State, ModelError> {
        (**self).find_state(name)
    }
    fn action_name(&self, agent: Agent, state: &Self::State, action: Action) -> String {
        (**self).action_name(agent, state, action)
    }
}

/// An action for every coalition member and a placeholder (`None`) for the
/// others. Indexed by agent number minus one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoalitionMove(pub Vec<Option<Action>>);

impl CoalitionMove {
    pub fn render<P: ModelProvider>(&self, provider: &P, state: &P::State) -> String {
        self.0
            .iter()
            .enumerate()
            .map(|(i, a)| match a {
                Some(a) => provider.action_name(i as Agent + 1, state, *a),
                None => "*".to_string(),
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn check_coalition<P: ModelProvider>(
    provider: &P,
    coalition: &Coalition,
) -> Result<(), ModelError> {
    let k = provider.agent_count();
    match coalition.agents().iter().find(|&&a| a == 0 || a > k) {
        Some(&a) => Err(ModelError::UnknownAgent(a)),
        None => Ok(()),
    }
}

/// All moves of `coalition` at `state`. The empty coalition has exactly one
/// move, made only of placeholders.
pub fn coalition_moves<P: ModelProvider>(
    provider: &P,
    state: &P::State,
    coalition: &Coalition,
) -> Result<Vec<CoalitionMove>, ModelError> {
    check_coalition(provider, coalition)?;
    let k = provider.agent_count() as usize;
    let mut moves = vec![vec![None; k]];
    for &agent in coalition.agents() {
        let acts = provider.available_actions(agent, state)?;
        let mut next = Vec::with_capacity(moves.len() * acts.len());
        for m in &moves {
            for &a in &acts {
                let mut m = m.clone();
                m[agent as usize - 1] = Some(a);
                next.push(m);
            }
        }
        moves = next;
    }
    Ok(moves.into_iter().map(CoalitionMove).collect())
}

/// Global moves that agree with `m` on every non-placeholder position.
pub fn completions<P: ModelProvider>(
    provider: &P,
    state: &P::State,
    m: &CoalitionMove,
) -> Result<Vec<Vec<Action>>, ModelError> {
    let k = provider.agent_count() as usize;
    if m.0.len() != k {
        return Err(ModelError::MoveArity {
            got: m.0.len(),
            want: k,
        });
    }
    let mut out = vec![Vec::with_capacity(k)];
    for (i, choice) in m.0.iter().enumerate() {
        let agent = i as Agent + 1;
        let acts = provider.available_actions(agent, state)?;
        let options = match choice {
            Some(a) if acts.contains(a) => vec![*a],
            Some(a) => {
                return Err(ModelError::ActionUnavailable {
                    agent,
                    action: provider.action_name(agent, state, *a),
                    state: provider.state_name(state),
                })
            }
            None => acts,
        };
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for &a in &options {
                let mut g = prefix.clone();
                g.push(a);
                next.push(g);
            }
        }
        out = next;
    }
    Ok(out)
}

/// States reachable from `state` in one step when the coalition plays `m`,
/// without duplicates, in order of first appearance.
pub fn out_set<P: ModelProvider>(
    provider: &P,
    state: &P::State,
    m: &CoalitionMove,
) -> Result<Vec<P::State>, ModelError> {
    let mut out: Vec<P::State> = Vec::new();
    for g in completions(provider, state, m)? {
        let t = provider.out(state, &g)?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}

/// The move of the complement of `coalition`, read off a global move.
pub fn restrict(global: &[Action], coalition: &Coalition) -> CoalitionMove {
    CoalitionMove(
        global
            .iter()
            .enumerate()
            .map(|(i, &a)| coalition.contains(i as Agent + 1).then_some(a))
            .collect(),
    )
}

/// Complement of `coalition` among the provider's agents.
pub fn complement<P: ModelProvider>(provider: &P, coalition: &Coalition) -> Coalition {
    Coalition::new(
        provider
            .agents()
            .into_iter()
            .filter(|a| !coalition.contains(*a)),
    )
}

/// The robots-and-carriage model: three positions on a circle, two robots
/// that each push or wait. Only robot 1 pushing moves the carriage one step
/// clockwise, only robot 2 pushing moves it back.
pub const ROBOTS: &str = include_str!("../../models/robots.cgm");

/// Two states with a single agent and a single action; `q` holds only at `s1`.
pub const TWO_STATE: &str = include_str!("../../models/two_state.cgm");

/// One state looping on itself, `p` true and `q` false.
pub const SINGLE_LOOP: &str = include_str!("../../models/single_loop.cgm");

/// States A, B and C: from A agent 2 picks B or C, both return to A. `p`
/// holds only at C.
pub const THREE_STATE: &str = include_str!("../../models/three_state.cgm");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn robots_out_sets() {
        let m = ExplicitCgm::parse(ROBOTS).unwrap();
        let q0 = m.find_state("q0").unwrap();
        let push = m.action_index(0, 1, "push").unwrap();
        let mv = CoalitionMove(vec![Some(push), None]);
        let mut names: Vec<String> = out_set(&m, &q0, &mv)
            .unwrap()
            .iter()
            .map(|s| m.state_name(s))
            .collect();
        names.sort();
        assert_eq!(names, ["q0", "q1"]);
    }

    #[test]
    fn empty_coalition_has_one_move() {
        let m = ExplicitCgm::parse(ROBOTS).unwrap();
        let q0 = m.find_state("q0").unwrap();
        let moves = coalition_moves(&m, &q0, &Coalition::empty()).unwrap();
        assert_eq!(moves, vec![CoalitionMove(vec![None, None])]);
        assert_eq!(out_set(&m, &q0, &moves[0]).unwrap().len(), 3);
    }

    #[test]
    fn three_state_moves_of_agent_two() {
        let m = ExplicitCgm::parse(THREE_STATE).unwrap();
        let a = m.find_state("A").unwrap();
        let moves = coalition_moves(&m, &a, &Coalition::new([2])).unwrap();
        let rendered: Vec<String> = moves.iter().map(|mv| mv.render(&m, &a)).collect();
        assert_eq!(rendered, ["*,b", "*,b'"]);
        let targets: Vec<String> = moves
            .iter()
            .map(|mv| {
                let out = out_set(&m, &a, mv).unwrap();
                assert_eq!(out.len(), 1);
                m.state_name(&out[0])
            })
            .collect();
        assert_eq!(targets, ["B", "C"]);
    }

    #[test]
    fn full_move_is_singleton_and_bad_action_rejected() {
        let m = ExplicitCgm::parse(ROBOTS).unwrap();
        let q1 = m.find_state("q1").unwrap();
        let all = Coalition::new([1, 2]);
        for mv in coalition_moves(&m, &q1, &all).unwrap() {
            assert_eq!(out_set(&m, &q1, &mv).unwrap().len(), 1);
        }
        assert_eq!(
            coalition_moves(&m, &q1, &Coalition::new([3])),
            Err(ModelError::UnknownAgent(3))
        );
        let bad = CoalitionMove(vec![Some(7), None]);
        assert!(matches!(
            out_set(&m, &q1, &bad),
            Err(ModelError::ActionUnavailable { .. })
        ));
    }

    #[test]
    fn moves_partition_global_moves() {
        let m = ExplicitCgm::parse(ROBOTS).unwrap();
        let q0 = m.find_state("q0").unwrap();
        for c in [
            Coalition::empty(),
            Coalition::new([1]),
            Coalition::new([2]),
            Coalition::new([1, 2]),
        ] {
            let opp = complement(&m, &c);
            let mut merged = Vec::new();
            for a in coalition_moves(&m, &q0, &c).unwrap() {
                for o in coalition_moves(&m, &q0, &opp).unwrap() {
                    let g: Vec<Action> =
                        a.0.iter()
                            .zip(&o.0)
                            .map(|(x, y)| x.or(*y).unwrap())
                            .collect();
                    assert_eq!(restrict(&g, &c), a);
                    merged.push(g);
                }
            }
            let all = completions(&m, &q0, &CoalitionMove(vec![None, None])).unwrap();
            merged.sort();
            let mut all_sorted = all.clone();
            all_sorted.sort();
            assert_eq!(merged, all_sorted);
        }
    }
}
