//! Models given as finite tables, and the text format they are loaded from.
//!
//! ```text
//! # comment
//! agents: 2
//! state q0 pos0
//! actions q0 1: push wait
//! trans q0 push,wait -> q1
//! ```
//!
//! An `(state, agent)` pair without an `actions` line has the single action
//! `0`. Every available global move needs exactly one `trans` row.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use super::{Action, ModelError, ModelProvider};
use crate::formula::Agent;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitCgm {
    agents: u32,
    names: Vec<String>,
    index: HashMap<String, usize>,
    labels: Vec<BTreeSet<String>>,
    // [state][agent - 1] -> action names
    actions: Vec<Vec<Vec<String>>>,
    // [state][mixed-radix move index] -> target, agent 1 most significant
    trans: Vec<Vec<usize>>,
}

impl ExplicitCgm {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut agents: Option<(u32, usize)> = None;
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let load = |msg: String| ModelError::Load { line: line_no, msg };
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match keyword.trim_end_matches(':') {
                "agents" => {
                    if agents.is_some() {
                        return Err(load("duplicate `agents` line".into()));
                    }
                    let n: u32 = rest
                        .trim_start_matches(':')
                        .trim()
                        .parse()
                        .map_err(|_| load(format!("bad agent count `{rest}`")))?;
                    if n == 0 {
                        return Err(load("a model needs at least one agent".into()));
                    }
                    agents = Some((n, line_no));
                }
                "state" => {
                    let mut words = rest.split_whitespace();
                    let name = words
                        .next()
                        .ok_or_else(|| load("missing state name".into()))?;
                    let labels: Vec<String> = words.map(str::to_string).collect();
                    rows.push((line_no, Row::State(name.to_string(), labels)));
                }
                "actions" => {
                    let (head, acts) = rest.split_once(':').ok_or_else(|| {
                        load("expected `actions <state> <agent>: <actions>`".into())
                    })?;
                    let mut words = head.split_whitespace();
                    let (Some(state), Some(agent), None) =
                        (words.next(), words.next(), words.next())
                    else {
                        return Err(load("expected `actions <state> <agent>: <actions>`".into()));
                    };
                    let agent: Agent = agent
                        .parse()
                        .map_err(|_| load(format!("bad agent `{agent}`")))?;
                    let acts = acts.split_whitespace().map(str::to_string).collect();
                    rows.push((line_no, Row::Actions(state.to_string(), agent, acts)));
                }
                "trans" => {
                    let (lhs, target) = rest.split_once("->").ok_or_else(|| {
                        load("expected `trans <state> <a1,...,ak> -> <state>`".into())
                    })?;
                    let lhs = lhs.trim();
                    let (state, mv) = lhs.split_once(char::is_whitespace).ok_or_else(|| {
                        load("expected `trans <state> <a1,...,ak> -> <state>`".into())
                    })?;
                    let mv: Vec<String> = mv.split(',').map(|a| a.trim().to_string()).collect();
                    if mv.iter().any(String::is_empty) {
                        return Err(load("empty action in move".into()));
                    }
                    let target = target.trim();
                    if target.is_empty() || target.contains(char::is_whitespace) {
                        return Err(load(format!("bad target state `{target}`")));
                    }
                    rows.push((
                        line_no,
                        Row::Trans(state.to_string(), mv, target.to_string()),
                    ));
                }
                other => return Err(load(format!("unknown keyword `{other}`"))),
            }
        }
        let (k, _) = agents.ok_or(ModelError::Load {
            line: 0,
            msg: "missing `agents:` line".into(),
        })?;
        let mut b = CgmBuilder::new(k);
        for (line, row) in rows {
            b.line = Some(line);
            match row {
                Row::State(name, labels) => {
                    b.state(&name, labels)?;
                }
                Row::Actions(state, agent, acts) => b.actions(&state, agent, acts),
                Row::Trans(state, mv, target) => b.transition(&state, mv, &target),
            }
        }
        b.build()
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = usize> {
        0..self.names.len()
    }

    pub fn labels(&self, state: usize) -> &BTreeSet<String> {
        &self.labels[state]
    }

    /// Index of the named action of `agent` at `state`.
    pub fn action_index(&self, state: usize, agent: Agent, name: &str) -> Option<Action> {
        self.actions
            .get(state)?
            .get(agent.checked_sub(1)? as usize)?
            .iter()
            .position(|a| a == name)
            .map(|i| i as Action)
    }

    fn move_index(&self, state: usize, mv: &[Action]) -> Result<usize, ModelError> {
        let acts = &self.actions[state];
        if mv.len() != acts.len() {
            return Err(ModelError::MoveArity {
                got: mv.len(),
                want: acts.len(),
            });
        }
        let mut ix = 0;
        for (i, (&a, names)) in mv.iter().zip(acts).enumerate() {
            if a as usize >= names.len() {
                return Err(ModelError::ActionUnavailable {
                    agent: i as Agent + 1,
                    action: a.to_string(),
                    state: self.names[state].clone(),
                });
            }
            ix = ix * names.len() + a as usize;
        }
        Ok(ix)
    }

    /// The model in the text format accepted by [`ExplicitCgm::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "agents: {}", self.agents);
        for s in self.states() {
            let mut line = format!("state {}", self.names[s]);
            for l in &self.labels[s] {
                line.push(' ');
                line.push_str(l);
            }
            let _ = writeln!(out, "{line}");
        }
        for s in self.states() {
            for (i, acts) in self.actions[s].iter().enumerate() {
                let _ = writeln!(
                    out,
                    "actions {} {}: {}",
                    self.names[s],
                    i + 1,
                    acts.join(" ")
                );
            }
        }
        for s in self.states() {
            for (ix, &t) in self.trans[s].iter().enumerate() {
                let mut rem = ix;
                let mut mv = vec![String::new(); self.actions[s].len()];
                for (i, acts) in self.actions[s].iter().enumerate().rev() {
                    mv[i] = acts[rem % acts.len()].clone();
                    rem /= acts.len();
                }
                let _ = writeln!(
                    out,
                    "trans {} {} -> {}",
                    self.names[s],
                    mv.join(","),
                    self.names[t]
                );
            }
        }
        out
    }
}

impl ModelProvider for ExplicitCgm {
    type State = usize;

    fn agent_count(&self) -> u32 {
        self.agents
    }

    fn available_actions(&self, agent: Agent, state: &usize) -> Result<Vec<Action>, ModelError> {
        let per_state = self
            .actions
            .get(*state)
            .ok_or_else(|| ModelError::UnknownState(state.to_string()))?;
        let acts = agent
            .checked_sub(1)
            .and_then(|i| per_state.get(i as usize))
            .ok_or(ModelError::UnknownAgent(agent))?;
        Ok((0..acts.len() as Action).collect())
    }

    fn out(&self, state: &usize, mv: &[Action]) -> Result<usize, ModelError> {
        if *state >= self.names.len() {
            return Err(ModelError::UnknownState(state.to_string()));
        }
        let ix = self.move_index(*state, mv)?;
        Ok(self.trans[*state][ix])
    }

    fn holds(&self, state: &usize, prop: &str) -> Result<bool, ModelError> {
        self.labels
            .get(*state)
            .map(|l| l.contains(prop))
            .ok_or_else(|| ModelError::UnknownState(state.to_string()))
    }

    fn state_name(&self, state: &usize) -> String {
        self.names
            .get(*state)
            .cloned()
            .unwrap_or_else(|| format!("#{state}"))
    }

    fn find_state(&self, name: &str) -> Result<usize, ModelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    fn action_name(&self, agent: Agent, state: &usize, action: Action) -> String {
        agent
            .checked_sub(1)
            .and_then(|i| {
                self.actions
                    .get(*state)?
                    .get(i as usize)?
                    .get(action as usize)
            })
            .cloned()
            .unwrap_or_else(|| action.to_string())
    }
}

enum Row {
    State(String, Vec<String>),
    Actions(String, Agent, Vec<String>),
    Trans(String, Vec<String>, String),
}

/// Assembles an [`ExplicitCgm`] by name. Nothing is checked until `build`.
#[derive(Debug, Default)]
pub struct CgmBuilder {
    agents: u32,
    states: Vec<(Option<usize>, String, Vec<String>)>,
    actions: Vec<(Option<usize>, String, Agent, Vec<String>)>,
    trans: Vec<(Option<usize>, String, Vec<String>, String)>,
    line: Option<usize>,
}

impl CgmBuilder {
    pub fn new(agents: u32) -> Self {
        CgmBuilder {
            agents,
            ..Default::default()
        }
    }

    /// Declares a state and returns its index.
    pub fn state(&mut self, name: &str, labels: Vec<String>) -> Result<usize, ModelError> {
        if self.states.iter().any(|(_, n, _)| n == name) {
            return Err(self.err(format!("duplicate state `{name}`")));
        }
        self.states.push((self.line, name.to_string(), labels));
        Ok(self.states.len() - 1)
    }

    pub fn actions(&mut self, state: &str, agent: Agent, names: Vec<String>) {
        self.actions
            .push((self.line, state.to_string(), agent, names));
    }

    pub fn transition(&mut self, state: &str, mv: Vec<String>, target: &str) {
        self.trans
            .push((self.line, state.to_string(), mv, target.to_string()));
    }

    fn err(&self, msg: String) -> ModelError {
        at(self.line, ModelError::Invalid(msg))
    }

    pub fn build(self) -> Result<ExplicitCgm, ModelError> {
        let k = self.agents as usize;
        if k == 0 {
            return Err(ModelError::Invalid(
                "a model needs at least one agent".into(),
            ));
        }
        if self.states.is_empty() {
            return Err(ModelError::Invalid(
                "a model needs at least one state".into(),
            ));
        }
        let index: HashMap<String, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, (_, n, _))| (n.clone(), i))
            .collect();
        let names: Vec<String> = self.states.iter().map(|(_, n, _)| n.clone()).collect();
        let labels = self
            .states
            .iter()
            .map(|(_, _, l)| l.iter().cloned().collect())
            .collect();
        let lookup = |line: Option<usize>, name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| at(line, ModelError::UnknownState(name.to_string())))
        };

        let mut actions: Vec<Vec<Option<Vec<String>>>> = vec![vec![None; k]; names.len()];
        for (line, state, agent, acts) in &self.actions {
            let s = lookup(*line, state)?;
            if *agent == 0 || *agent as usize > k {
                return Err(at(*line, ModelError::UnknownAgent(*agent)));
            }
            let invalid = |msg: String| at(*line, ModelError::Invalid(msg));
            if acts.is_empty() {
                return Err(invalid(format!(
                    "empty action set for agent {agent} at `{state}`"
                )));
            }
            let distinct: HashSet<&String> = acts.iter().collect();
            if distinct.len() != acts.len() {
                return Err(invalid(format!(
                    "repeated action for agent {agent} at `{state}`"
                )));
            }
            if let Some(bad) = acts.iter().find(|a| a.contains(',') || a.contains("->")) {
                return Err(invalid(format!("bad action name `{bad}`")));
            }
            let slot = &mut actions[s][*agent as usize - 1];
            if slot.is_some() {
                return Err(invalid(format!(
                    "actions for agent {agent} at `{state}` given twice"
                )));
            }
            *slot = Some(acts.clone());
        }
        let actions: Vec<Vec<Vec<String>>> = actions
            .into_iter()
            .map(|per| {
                per.into_iter()
                    .map(|a| a.unwrap_or_else(|| vec!["0".to_string()]))
                    .collect()
            })
            .collect();

        let mut trans: Vec<Vec<Option<usize>>> = actions
            .iter()
            .map(|per| vec![None; per.iter().map(Vec::len).product()])
            .collect();
        for (line, state, mv, target) in &self.trans {
            let s = lookup(*line, state)?;
            let t = lookup(*line, target)?;
            if mv.len() != k {
                return Err(at(
                    *line,
                    ModelError::MoveArity {
                        got: mv.len(),
                        want: k,
                    },
                ));
            }
            let mut ix = 0;
            for (i, name) in mv.iter().enumerate() {
                let acts = &actions[s][i];
                let a = acts.iter().position(|x| x == name).ok_or_else(|| {
                    at(
                        *line,
                        ModelError::ActionUnavailable {
                            agent: i as Agent + 1,
                            action: name.clone(),
                            state: state.clone(),
                        },
                    )
                })?;
                ix = ix * acts.len() + a;
            }
            let slot = &mut trans[s][ix];
            if slot.is_some() {
                return Err(at(
                    *line,
                    ModelError::Invalid(format!(
                        "duplicate transition for `{state}` on ({})",
                        mv.join(",")
                    )),
                ));
            }
            *slot = Some(t);
        }
        let mut table = Vec::with_capacity(names.len());
        for (s, row) in trans.into_iter().enumerate() {
            let mut full = Vec::with_capacity(row.len());
            for (ix, t) in row.into_iter().enumerate() {
                match t {
                    Some(t) => full.push(t),
                    None => {
                        let mut rem = ix;
                        let mut mv = vec![""; k];
                        for (i, acts) in actions[s].iter().enumerate().rev() {
                            mv[i] = &acts[rem % acts.len()];
                            rem /= acts.len();
                        }
                        return Err(ModelError::MissingTransition {
                            state: names[s].clone(),
                            mv: mv.join(","),
                        });
                    }
                }
            }
            table.push(full);
        }
        Ok(ExplicitCgm {
            agents: self.agents,
            names,
            index,
            labels,
            actions,
            trans: table,
        })
    }
}

fn at(line: Option<usize>, e: ModelError) -> ModelError {
    match line {
        Some(line) => ModelError::Load {
            line,
            msg: e.to_string(),
        },
        None => e,
    }
}
