//! Product of model states and per-operator status flags.
//!
//! Each temporal operator in the body becomes an atom whose status can only
//! move once, from open to won or lost. A play therefore changes its status
//! vector finitely often, and whether the body holds is decided by the
//! vector it settles in. Vectors are solved from the most settled to the
//! least: a vector whose limit satisfies the body is a safety game (stay, or
//! leave towards winning nodes), otherwise a reachability game towards
//! winning nodes of more settled vectors.

use super::arena::pre;
use super::OracleError;
use crate::formula::{Formula, PathFormula};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    Atom(usize),
    And(Box<Objective>, Box<Objective>),
    Or(Box<Objective>, Box<Objective>),
}

impl Objective {
    /// Splits a path formula into its boolean skeleton and its temporal
    /// atoms, appending new atoms to `atoms`.
    pub fn build(body: &PathFormula, atoms: &mut Vec<PathFormula>) -> Objective {
        match body {
            PathFormula::And(a, b) => Objective::And(
                Box::new(Objective::build(a, atoms)),
                Box::new(Objective::build(b, atoms)),
            ),
            PathFormula::Or(a, b) => Objective::Or(
                Box::new(Objective::build(a, atoms)),
                Box::new(Objective::build(b, atoms)),
            ),
            atom => {
                let i = match atoms.iter().position(|x| x == atom) {
                    Some(i) => i,
                    None => {
                        atoms.push(atom.clone());
                        atoms.len() - 1
                    }
                };
                Objective::Atom(i)
            }
        }
    }

    /// Value on a play that keeps the given statuses forever.
    pub fn limit(&self, atoms: &[AtomTruth], v: &[Status]) -> bool {
        match self {
            Objective::Atom(i) => match v[*i] {
                Status::Won => true,
                Status::Lost => false,
                Status::Open => matches!(atoms[*i], AtomTruth::Always(_)),
            },
            Objective::And(a, b) => a.limit(atoms, v) && b.limit(atoms, v),
            Objective::Or(a, b) => a.limit(atoms, v) || b.limit(atoms, v),
        }
    }
}

/// A temporal atom with its arguments evaluated at every state.
#[derive(Clone, Debug)]
pub enum AtomTruth {
    State(Vec<bool>),
    Next(Vec<bool>),
    Always(Vec<bool>),
    Until(Vec<bool>, Vec<bool>),
}

impl AtomTruth {
    pub fn evaluate(
        atom: &PathFormula,
        mut eval: impl FnMut(&Formula) -> Result<Vec<bool>, OracleError>,
    ) -> Result<AtomTruth, OracleError> {
        Ok(match atom {
            PathFormula::State(f) => AtomTruth::State(eval(f)?),
            PathFormula::Next(f) => AtomTruth::Next(eval(f)?),
            PathFormula::Always(f) => AtomTruth::Always(eval(f)?),
            PathFormula::Until(a, b) => AtomTruth::Until(eval(a)?, eval(b)?),
            PathFormula::And(..) | PathFormula::Or(..) => {
                unreachable!("boolean nodes are not atoms")
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    /// Until still pending, box still alive, next not yet taken.
    Open,
    Won,
    Lost,
}

fn won_if(b: bool) -> Status {
    if b {
        Status::Won
    } else {
        Status::Lost
    }
}

pub type StatusVector = Vec<Status>;

/// Statuses after visiting the first state of a play.
pub fn initial(atoms: &[AtomTruth], s: usize) -> StatusVector {
    atoms
        .iter()
        .map(|a| match a {
            AtomTruth::State(v) => won_if(v[s]),
            AtomTruth::Next(_) => Status::Open,
            AtomTruth::Always(v) => {
                if v[s] {
                    Status::Open
                } else {
                    Status::Lost
                }
            }
            AtomTruth::Until(hold, goal) => {
                if goal[s] {
                    Status::Won
                } else if hold[s] {
                    Status::Open
                } else {
                    Status::Lost
                }
            }
        })
        .collect()
}

/// Statuses after moving to state `t`.
pub fn step(atoms: &[AtomTruth], v: &[Status], t: usize) -> StatusVector {
    atoms
        .iter()
        .zip(v)
        .map(|(a, &st)| {
            if st != Status::Open {
                return st;
            }
            match a {
                AtomTruth::State(_) => st,
                AtomTruth::Next(x) => won_if(x[t]),
                AtomTruth::Always(x) => {
                    if x[t] {
                        Status::Open
                    } else {
                        Status::Lost
                    }
                }
                AtomTruth::Until(hold, goal) => {
                    if goal[t] {
                        Status::Won
                    } else if hold[t] {
                        Status::Open
                    } else {
                        Status::Lost
                    }
                }
            }
        })
        .collect()
}

fn encode(v: &[Status]) -> usize {
    v.iter().fold(0, |acc, s| acc * 3 + *s as usize)
}

fn decode(mut code: usize, m: usize) -> StatusVector {
    let mut v = vec![Status::Open; m];
    for slot in v.iter_mut().rev() {
        *slot = match code % 3 {
            0 => Status::Open,
            1 => Status::Won,
            _ => Status::Lost,
        };
        code /= 3;
    }
    v
}

/// Winning start states. `groups[s]` lists, for each coalition move at `s`,
/// the states it can lead to.
pub fn solve(
    groups: &[Vec<Vec<usize>>],
    universal: bool,
    objective: &Objective,
    atoms: &[AtomTruth],
    cap: usize,
) -> Result<Vec<bool>, OracleError> {
    let n = groups.len();
    let m = atoms.len();
    let codes = u32::try_from(m)
        .ok()
        .and_then(|m| 3usize.checked_pow(m))
        .filter(|c| c.checked_mul(n).is_some_and(|x| x <= cap))
        .ok_or(OracleError::TooLarge {
            what: "game nodes",
            cap,
        })?;

    let mut order: Vec<usize> = (0..codes).collect();
    let settled = |c: usize| decode(c, m).iter().filter(|s| **s != Status::Open).count();
    order.sort_by_key(|&c| std::cmp::Reverse(settled(c)));

    // win[s * codes + c]
    let mut win = vec![false; n * codes];
    for c in order {
        let v = decode(c, m);
        let next: Vec<usize> = (0..n).map(|t| encode(&step(atoms, &v, t))).collect();
        let stay = objective.limit(atoms, &v);
        let mut z = vec![stay; n];
        loop {
            let z2: Vec<bool> = (0..n)
                .map(|s| {
                    pre(&groups[s], universal, |t| {
                        if next[t] == c {
                            z[t]
                        } else {
                            win[t * codes + next[t]]
                        }
                    })
                })
                .collect();
            if z2 == z {
                break;
            }
            z = z2;
        }
        for s in 0..n {
            win[s * codes + c] = z[s];
        }
    }
    Ok((0..n)
        .map(|s| win[s * codes + encode(&initial(atoms, s))])
        .collect())
}
