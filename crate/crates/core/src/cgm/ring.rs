use super::{Action, ModelError, ModelProvider};
use crate::formula::Agent;

const PUSH: Action = 0;
const WAIT: Action = 1;

/// The robots-and-carriage rules on a ring of `n` positions, computed on
/// demand. State `i` is labelled `pos<i>`.
#[derive(Clone, Copy, Debug)]
pub struct RingModel {
    n: usize,
}

impl RingModel {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "a ring needs at least one cell");
        RingModel { n }
    }

    fn check(&self, s: usize) -> Result<(), ModelError> {
        if s < self.n {
            Ok(())
        } else {
            Err(ModelError::UnknownState(s.to_string()))
        }
    }
}

impl ModelProvider for RingModel {
    type State = usize;

    fn agent_count(&self) -> u32 {
        2
    }

    fn available_actions(&self, agent: Agent, state: &usize) -> Result<Vec<Action>, ModelError> {
        self.check(*state)?;
        match agent {
            1 | 2 => Ok(vec![PUSH, WAIT]),
            a => Err(ModelError::UnknownAgent(a)),
        }
    }

    fn out(&self, state: &usize, mv: &[Action]) -> Result<usize, ModelError> {
        self.check(*state)?;
        match mv {
            [PUSH, WAIT] => Ok((state + 1) % self.n),
            [WAIT, PUSH] => Ok((state + self.n - 1) % self.n),
            [PUSH, PUSH] | [WAIT, WAIT] => Ok(*state),
            [a, b] => Err(ModelError::ActionUnavailable {
                agent: if *a > WAIT { 1 } else { 2 },
                action: (if *a > WAIT { a } else { b }).to_string(),
                state: self.state_name(state),
            }),
            _ => Err(ModelError::MoveArity {
                got: mv.len(),
                want: 2,
            }),
        }
    }

    fn holds(&self, state: &usize, prop: &str) -> Result<bool, ModelError> {
        self.check(*state)?;
        Ok(prop.strip_prefix("pos") == Some(state.to_string().as_str()))
    }

    fn state_name(&self, state: &usize) -> String {
        format!("q{state}")
    }

    fn find_state(&self, name: &str) -> Result<usize, ModelError> {
        name.strip_prefix('q')
            .and_then(|i| i.parse().ok())
            .filter(|&i| i < self.n && name == format!("q{i}"))
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    fn action_name(&self, _agent: Agent, _state: &usize, action: Action) -> String {
        match action {
            PUSH => "push".into(),
            WAIT => "wait".into(),
            a => a.to_string(),
        }
    }
}
