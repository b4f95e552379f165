use std::collections::HashSet;
use std::sync::Mutex;

use super::{Action, ModelError, ModelProvider};
use crate::formula::Agent;

/// Wraps a provider and records every distinct state that was passed to it
/// or returned by it.
#[derive(Debug)]
pub struct Tracked<P: ModelProvider> {
    inner: P,
    seen: Mutex<HashSet<P::State>>,
}

impl<P: ModelProvider> Tracked<P> {
    pub fn new(inner: P) -> Self {
        Tracked {
            inner,
            seen: Mutex::new(HashSet::new()),
        }
    }

    pub fn materialized(&self) -> usize {
        self.seen.lock().expect("tracker lock").len()
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }

    fn touch(&self, s: &P::State) {
        let mut seen = self.seen.lock().expect("tracker lock");
        if !seen.contains(s) {
            seen.insert(s.clone());
        }
    }
}

impl<P: ModelProvider> ModelProvider for Tracked<P> {
    type State = P::State;

    fn agent_count(&self) -> u32 {
        self.inner.agent_count()
    }

    fn available_actions(&self, agent: Agent, state: &P::State) -> Result<Vec<Action>, ModelError> {
        self.touch(state);
        self.inner.available_actions(agent, state)
    }

    fn out(&self, state: &P::State, mv: &[Action]) -> Result<P::State, ModelError> {
        self.touch(state);
        let t = self.inner.out(state, mv)?;
        self.touch(&t);
        Ok(t)
    }

    fn holds(&self, state: &P::State, prop: &str) -> Result<bool, ModelError> {
        self.touch(state);
        self.inner.holds(state, prop)
    }

    fn state_name(&self, state: &P::State) -> String {
        self.inner.state_name(state)
    }

    fn find_state(&self, name: &str) -> Result<P::State, ModelError> {
        let s = self.inner.find_state(name)?;
        self.touch(&s);
        Ok(s)
    }

    fn action_name(&self, agent: Agent, state: &P::State, action: Action) -> String {
        self.inner.action_name(agent, state, action)
    }
}
