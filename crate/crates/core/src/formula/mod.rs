//! ATL+ formulas in negation normal form.
//!
//! State formulas are [`Formula`], path formulas are [`PathFormula`]. Every
//! temporal operator takes state-formula arguments, so nesting `X G p` is not
//! representable without an intervening coalition quantifier.

mod closure;
mod nnf;
mod parse;

use std::fmt;

pub use closure::closure;
pub use nnf::{to_nnf, PathExpr, StateExpr};
pub use parse::{parse, parse_expr, ParseError};

/// Agents are numbered from 1.
pub type Agent = u32;

/// A set of agents, kept sorted and free of duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(Vec<Agent>);

impl Coalition {
    pub fn new(agents: impl IntoIterator<Item = Agent>) -> Self {
        let mut v: Vec<Agent> = agents.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Coalition(v)
    }

    pub fn empty() -> Self {
        Coalition(Vec::new())
    }

    pub fn agents(&self) -> &[Agent] {
        &self.0
    }

    pub fn contains(&self, a: Agent) -> bool {
        self.0.binary_search(&a).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Which of the two coalition quantifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quant {
    /// `<<A>>`: the coalition has a strategy.
    Exist,
    /// `[[A]]`: the coalition cannot avoid.
    Univ,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Prop(String),
    NegProp(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exist(Coalition, Box<PathFormula>),
    Univ(Coalition, Box<PathFormula>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathFormula {
    State(Formula),
    And(Box<PathFormula>, Box<PathFormula>),
    Or(Box<PathFormula>, Box<PathFormula>),
    Next(Formula),
    Always(Formula),
    Until(Formula, Formula),
}

impl Formula {
    pub fn prop(name: &str) -> Self {
        Formula::Prop(name.to_string())
    }

    pub fn neg_prop(name: &str) -> Self {
        Formula::NegProp(name.to_string())
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn exist(c: Coalition, body: PathFormula) -> Self {
        Formula::Exist(c, Box::new(body))
    }

    pub fn univ(c: Coalition, body: PathFormula) -> Self {
        Formula::Univ(c, Box::new(body))
    }

    pub fn quantified(q: Quant, c: Coalition, body: PathFormula) -> Self {
        match q {
            Quant::Exist => Formula::exist(c, body),
            Quant::Univ => Formula::univ(c, body),
        }
    }

    /// Quantifier, coalition and body of a `<<A>>` or `[[A]]` formula.
    pub fn as_quantified(&self) -> Option<(Quant, &Coalition, &PathFormula)> {
        match self {
            Formula::Exist(c, b) => Some((Quant::Exist, c, b)),
            Formula::Univ(c, b) => Some((Quant::Univ, c, b)),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(
            self,
            Formula::True | Formula::False | Formula::Prop(_) | Formula::NegProp(_)
        )
    }

    /// Number of AST nodes, counting path nodes inside quantifiers.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::NegProp(_) => 1,
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::Exist(_, p) | Formula::Univ(_, p) => 1 + p.size(),
        }
    }

    /// Nesting depth of `G` operators.
    pub fn box_modal_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::NegProp(_) => 0,
            Formula::And(a, b) | Formula::Or(a, b) => a.box_modal_depth().max(b.box_modal_depth()),
            Formula::Exist(_, p) | Formula::Univ(_, p) => p.box_modal_depth(),
        }
    }

    /// Nesting depth of coalition quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::NegProp(_) => 0,
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Exist(_, p) | Formula::Univ(_, p) => 1 + p.quantifier_depth(),
        }
    }

    /// Largest agent number mentioned in any coalition.
    pub fn max_agent(&self) -> Option<Agent> {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::NegProp(_) => None,
            Formula::And(a, b) | Formula::Or(a, b) => a.max_agent().max(b.max_agent()),
            Formula::Exist(c, p) | Formula::Univ(c, p) => {
                c.agents().last().copied().max(p.max_agent())
            }
        }
    }

    /// Quantified formula whose body is built from untils by `&` and `|`.
    pub fn is_until_assertion(&self) -> bool {
        self.as_quantified()
            .is_some_and(|(_, _, b)| b.is_until_formula())
    }
}

impl PathFormula {
    pub fn and(a: PathFormula, b: PathFormula) -> Self {
        PathFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PathFormula, b: PathFormula) -> Self {
        PathFormula::Or(Box::new(a), Box::new(b))
    }

    /// `F f`, which is sugar for `T U f`.
    pub fn eventually(f: Formula) -> Self {
        PathFormula::Until(Formula::True, f)
    }

    pub fn size(&self) -> usize {
        match self {
            PathFormula::State(f) => f.size(),
            PathFormula::And(a, b) | PathFormula::Or(a, b) => 1 + a.size() + b.size(),
            PathFormula::Next(f) | PathFormula::Always(f) => 1 + f.size(),
            PathFormula::Until(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn box_modal_depth(&self) -> usize {
        match self {
            PathFormula::State(f) | PathFormula::Next(f) => f.box_modal_depth(),
            PathFormula::And(a, b) | PathFormula::Or(a, b) => {
                a.box_modal_depth().max(b.box_modal_depth())
            }
            PathFormula::Always(f) => f.box_modal_depth() + 1,
            PathFormula::Until(a, b) => a.box_modal_depth().max(b.box_modal_depth()),
        }
    }

    fn quantifier_depth(&self) -> usize {
        match self {
            PathFormula::State(f) | PathFormula::Next(f) | PathFormula::Always(f) => {
                f.quantifier_depth()
            }
            PathFormula::And(a, b) | PathFormula::Or(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            PathFormula::Until(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
        }
    }

    fn max_agent(&self) -> Option<Agent> {
        match self {
            PathFormula::State(f) | PathFormula::Next(f) | PathFormula::Always(f) => f.max_agent(),
            PathFormula::And(a, b) | PathFormula::Or(a, b) => a.max_agent().max(b.max_agent()),
            PathFormula::Until(a, b) => a.max_agent().max(b.max_agent()),
        }
    }

    /// Untils and boxes combined by `&` and `|`. These are the bodies that can
    /// reproduce themselves through the successor relation.
    pub fn is_self_generating(&self) -> bool {
        match self {
            PathFormula::Until(..) | PathFormula::Always(_) => true,
            PathFormula::And(a, b) | PathFormula::Or(a, b) => {
                a.is_self_generating() && b.is_self_generating()
            }
            _ => false,
        }
    }

    /// Untils combined by `&` and `|`.
    pub fn is_until_formula(&self) -> bool {
        match self {
            PathFormula::Until(..) => true,
            PathFormula::And(a, b) | PathFormula::Or(a, b) => {
                a.is_until_formula() && b.is_until_formula()
            }
            _ => false,
        }
    }

    /// Truth of the body on an infinite path that loops forever without any
    /// pending until being fulfilled: untils count as false, boxes as true.
    /// State subformulas and next-operators never reach this point in a loop,
    /// so they are treated as false.
    pub fn holds_in_limit(&self) -> bool {
        match self {
            PathFormula::Always(_) => true,
            PathFormula::Until(..) | PathFormula::Next(_) | PathFormula::State(_) => false,
            PathFormula::And(a, b) => a.holds_in_limit() && b.holds_in_limit(),
            PathFormula::Or(a, b) => a.holds_in_limit() || b.holds_in_limit(),
        }
    }
}

/// Shape of a state formula as seen by the proof rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulaKind<'a> {
    Literal,
    Alpha(&'a Formula, &'a Formula),
    Beta(&'a Formula, &'a Formula),
    /// `<<A>>X f` or `[[A]]X f`.
    PrimitiveSuccessor {
        quant: Quant,
        coalition: &'a Coalition,
        successor: &'a Formula,
    },
    /// Any other quantified formula.
    Gamma {
        quant: Quant,
        coalition: &'a Coalition,
        body: &'a PathFormula,
    },
}

pub fn classify(f: &Formula) -> FormulaKind<'_> {
    match f {
        Formula::True | Formula::False | Formula::Prop(_) | Formula::NegProp(_) => {
            FormulaKind::Literal
        }
        Formula::And(a, b) => FormulaKind::Alpha(a, b),
        Formula::Or(a, b) => FormulaKind::Beta(a, b),
        Formula::Exist(c, body) | Formula::Univ(c, body) => {
            let quant = if matches!(f, Formula::Exist(..)) {
                Quant::Exist
            } else {
                Quant::Univ
            };
            match body.as_ref() {
                PathFormula::Next(successor) => FormulaKind::PrimitiveSuccessor {
                    quant,
                    coalition: c,
                    successor,
                },
                body => FormulaKind::Gamma {
                    quant,
                    coalition: c,
                    body,
                },
            }
        }
    }
}

// Display writes the surface syntax accepted by `parse`, fully parenthesised
// for binary operators so that it reparses to the same tree.

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("T"),
            Formula::False => f.write_str("~T"),
            Formula::Prop(p) => f.write_str(p),
            Formula::NegProp(p) => write!(f, "~{p}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Exist(c, b) => write!(f, "<<{c}>>{b}"),
            Formula::Univ(c, b) => write!(f, "[[{c}]]{b}"),
        }
    }
}

impl fmt::Display for PathFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathFormula::State(s) => write!(f, "{s}"),
            PathFormula::And(a, b) => write!(f, "({a} & {b})"),
            PathFormula::Or(a, b) => write!(f, "({a} | {b})"),
            PathFormula::Next(s) => write!(f, "X {s}"),
            PathFormula::Always(s) => write!(f, "G {s}"),
            PathFormula::Until(Formula::True, b) => write!(f, "F {b}"),
            // A quantifier would swallow the until, so guard the left side.
            PathFormula::Until(a, b) if a.as_quantified().is_some() => write!(f, "(({a}) U {b})"),
            PathFormula::Until(a, b) => write!(f, "({a} U {b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c1() -> Coalition {
        Coalition::new([1])
    }

    #[test]
    fn classify_shapes() {
        let p = Formula::prop("p");
        assert_eq!(classify(&p), FormulaKind::Literal);
        assert_eq!(classify(&Formula::False), FormulaKind::Literal);
        let succ = Formula::exist(c1(), PathFormula::Next(p.clone()));
        assert!(matches!(
            classify(&succ),
            FormulaKind::PrimitiveSuccessor {
                quant: Quant::Exist,
                ..
            }
        ));
        let g = Formula::univ(c1(), PathFormula::Always(p.clone()));
        assert!(matches!(
            classify(&g),
            FormulaKind::Gamma {
                quant: Quant::Univ,
                ..
            }
        ));
        // A quantifier over a plain state formula is still expanded by gamma.
        let s = Formula::exist(c1(), PathFormula::State(p.clone()));
        assert!(matches!(classify(&s), FormulaKind::Gamma { .. }));
        let a = Formula::and(p.clone(), p.clone());
        assert!(matches!(classify(&a), FormulaKind::Alpha(..)));
    }

    #[test]
    fn box_depth_counts_nested_boxes() {
        let p = Formula::prop("p");
        let inner = Formula::exist(c1(), PathFormula::Always(p.clone()));
        let outer = Formula::exist(c1(), PathFormula::Always(inner.clone()));
        assert_eq!(inner.box_modal_depth(), 1);
        assert_eq!(outer.box_modal_depth(), 2);
        let next = Formula::exist(c1(), PathFormula::Next(inner));
        assert_eq!(next.box_modal_depth(), 1);
    }

    #[test]
    fn until_and_self_generating() {
        let p = Formula::prop("p");
        let q = Formula::prop("q");
        let u = PathFormula::Until(p.clone(), q.clone());
        let g = PathFormula::Always(p.clone());
        assert!(u.is_until_formula());
        assert!(PathFormula::and(u.clone(), u.clone()).is_until_formula());
        assert!(!PathFormula::and(u.clone(), g.clone()).is_until_formula());
        assert!(PathFormula::or(u.clone(), g.clone()).is_self_generating());
        assert!(!PathFormula::Next(p.clone()).is_self_generating());
        assert!(!PathFormula::State(p.clone()).is_self_generating());
    }

    #[test]
    fn limit_truth() {
        let p = Formula::prop("p");
        let u = PathFormula::eventually(p.clone());
        let g = PathFormula::Always(p.clone());
        assert!(g.holds_in_limit());
        assert!(!u.holds_in_limit());
        assert!(!PathFormula::and(g.clone(), u.clone()).holds_in_limit());
        assert!(PathFormula::or(g, u).holds_in_limit());
    }

    #[test]
    fn coalition_normalises() {
        let c = Coalition::new([2, 1, 2]);
        assert_eq!(c.agents(), &[1, 2]);
        assert_eq!(c.to_string(), "1,2");
        assert!(Coalition::empty().is_empty());
    }

    #[test]
    fn display_is_surface_syntax() {
        let f = Formula::exist(
            c1(),
            PathFormula::and(
                PathFormula::eventually(Formula::prop("q")),
                PathFormula::Always(Formula::neg_prop("p")),
            ),
        );
        assert_eq!(f.to_string(), "<<1>>(F q & G ~p)");
        assert_eq!(f.size(), 7);
        assert_eq!(f.max_agent(), Some(1));
    }
}
