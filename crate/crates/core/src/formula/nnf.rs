//! Surface syntax trees and their conversion to negation normal form.

use super::{Coalition, Formula, PathFormula};

/// State formula as written, with negation anywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateExpr {
    True,
    Prop(String),
    Not(Box<StateExpr>),
    And(Box<StateExpr>, Box<StateExpr>),
    Or(Box<StateExpr>, Box<StateExpr>),
    Exist(Coalition, Box<PathExpr>),
    Univ(Coalition, Box<PathExpr>),
}

/// Path formula as written. `F f` has already become `T U f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathExpr {
    State(StateExpr),
    Not(Box<PathExpr>),
    And(Box<PathExpr>, Box<PathExpr>),
    Or(Box<PathExpr>, Box<PathExpr>),
    Next(StateExpr),
    Always(StateExpr),
    Until(StateExpr, StateExpr),
    Release(StateExpr, StateExpr),
}

pub fn to_nnf(e: &StateExpr) -> Formula {
    state(e, false)
}

fn state(e: &StateExpr, neg: bool) -> Formula {
    match e {
        StateExpr::True if neg => Formula::False,
        StateExpr::True => Formula::True,
        StateExpr::Prop(p) if neg => Formula::NegProp(p.clone()),
        StateExpr::Prop(p) => Formula::Prop(p.clone()),
        StateExpr::Not(inner) => state(inner, !neg),
        StateExpr::And(a, b) if neg => Formula::or(state(a, true), state(b, true)),
        StateExpr::And(a, b) => Formula::and(state(a, false), state(b, false)),
        StateExpr::Or(a, b) if neg => Formula::and(state(a, true), state(b, true)),
        StateExpr::Or(a, b) => Formula::or(state(a, false), state(b, false)),
        StateExpr::Exist(c, body) if neg => Formula::univ(c.clone(), path(body, true)),
        StateExpr::Exist(c, body) => Formula::exist(c.clone(), path(body, false)),
        StateExpr::Univ(c, body) if neg => Formula::exist(c.clone(), path(body, true)),
        StateExpr::Univ(c, body) => Formula::univ(c.clone(), path(body, false)),
    }
}

// a R b == G b | (b U (a & b))
fn release(a: Formula, b: Formula) -> PathFormula {
    PathFormula::or(
        PathFormula::Always(b.clone()),
        PathFormula::Until(b.clone(), Formula::and(a, b)),
    )
}

fn path(e: &PathExpr, neg: bool) -> PathFormula {
    match e {
        PathExpr::State(s) => PathFormula::State(state(s, neg)),
        PathExpr::Not(inner) => path(inner, !neg),
        PathExpr::And(a, b) if neg => PathFormula::or(path(a, true), path(b, true)),
        PathExpr::And(a, b) => PathFormula::and(path(a, false), path(b, false)),
        PathExpr::Or(a, b) if neg => PathFormula::and(path(a, true), path(b, true)),
        PathExpr::Or(a, b) => PathFormula::or(path(a, false), path(b, false)),
        PathExpr::Next(s) => PathFormula::Next(state(s, neg)),
        PathExpr::Always(s) if neg => PathFormula::Until(Formula::True, state(s, true)),
        PathExpr::Always(s) => PathFormula::Always(state(s, false)),
        PathExpr::Until(a, b) if neg => release(state(a, true), state(b, true)),
        PathExpr::Until(a, b) => PathFormula::Until(state(a, false), state(b, false)),
        PathExpr::Release(a, b) if neg => PathFormula::Until(state(a, true), state(b, true)),
        PathExpr::Release(a, b) => release(state(a, false), state(b, false)),
    }
}
