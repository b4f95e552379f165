//! Parser for the ASCII formula syntax.
//!
//! ```text
//! or     := and ('|' and)*
//! and    := until ('&' until)*
//! until  := unary (('U' | 'R') until)?
//! unary  := '~' unary | ('X' | 'G' | 'F') unary | quant until | atom
//! quant  := '<<' agents '>>' | '[[' agents ']]'
//! agents := (number (',' number)*)?
//! atom   := 'T' | ident | '(' or ')'
//! ```
//!
//! A quantifier takes an until-level operand, so `<<1>> p U q` quantifies the
//! whole until while `<<1>> G p & q` is a conjunction. Single upper-case
//! letters used as operators are reserved.

use std::fmt;

use thiserror::Error;

use super::nnf::{to_nnf, PathExpr, StateExpr};
use super::{Agent, Coalition, Formula, Quant};

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("not an ATL+ formula: {reason} in `{subformula}`")]
    NotAtlPlus { subformula: String, reason: String },
}

/// Parses a formula and converts it to negation normal form.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_expr(text).map(|e| to_nnf(&e))
}

/// Parses a formula, keeping negations where they were written.
pub fn parse_expr(text: &str) -> Result<StateExpr, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        depth: 0,
        end: text.len(),
    };
    let ast = p.or()?;
    if let Some((tok, at)) = p.tokens.get(p.pos) {
        return Err(syntax(*at, format!("unexpected {tok}")));
    }
    to_state(&ast)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(Agent),
    LAngle,
    RAngle,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Comma,
    Tilde,
    Amp,
    Bar,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::LAngle => f.write_str("`<<`"),
            Tok::RAngle => f.write_str("`>>`"),
            Tok::LBrack => f.write_str("`[[`"),
            Tok::RBrack => f.write_str("`]]`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Bar => f.write_str("`|`"),
        }
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let pair = |t: Tok, second: u8| -> Result<Tok, ParseError> {
            if bytes.get(start + 1) == Some(&second) {
                Ok(t)
            } else {
                Err(syntax(start, format!("expected `{0}{0}`", second as char)))
            }
        };
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'<' => pair(Tok::LAngle, b'<')?,
            b'>' => pair(Tok::RAngle, b'>')?,
            b'[' => pair(Tok::LBrack, b'[')?,
            b']' => pair(Tok::RBrack, b']')?,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'~' => Tok::Tilde,
            b'&' => Tok::Amp,
            b'|' => Tok::Bar,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i]
                    .parse()
                    .map_err(|_| syntax(start, "agent number out of range"))?;
                out.push((Tok::Num(n), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        i += match tok {
            Tok::LAngle | Tok::RAngle | Tok::LBrack | Tok::RBrack => 2,
            _ => 1,
        };
        out.push((tok, start));
    }
    Ok(out)
}

// Untyped tree; state and path sorts are checked afterwards so that errors
// can name the offending subformula.
#[derive(Clone, Debug)]
enum Ast {
    True,
    Prop(String),
    Not(Box<Ast>),
    And(Box<Ast>, Box<Ast>),
    Or(Box<Ast>, Box<Ast>),
    Quant(Quant, Coalition, Box<Ast>),
    Next(Box<Ast>),
    Always(Box<Ast>),
    Eventually(Box<Ast>),
    Until(Box<Ast>, Box<Ast>),
    Release(Box<Ast>, Box<Ast>),
}

impl Ast {
    // Temporal operator at path level, ignoring anything under a quantifier.
    fn has_path_temporal(&self) -> bool {
        match self {
            Ast::Not(a) => a.has_path_temporal(),
            Ast::And(a, b) | Ast::Or(a, b) => a.has_path_temporal() || b.has_path_temporal(),
            Ast::True | Ast::Prop(_) | Ast::Quant(..) => false,
            _ => true,
        }
    }

    fn is_temporal(&self) -> bool {
        matches!(
            self,
            Ast::Next(_) | Ast::Always(_) | Ast::Eventually(_) | Ast::Until(..) | Ast::Release(..)
        )
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::True => f.write_str("T"),
            Ast::Prop(p) => f.write_str(p),
            Ast::Not(a) => write!(f, "~{a}"),
            Ast::And(a, b) => write!(f, "({a} & {b})"),
            Ast::Or(a, b) => write!(f, "({a} | {b})"),
            Ast::Quant(Quant::Exist, c, a) => write!(f, "<<{c}>>{a}"),
            Ast::Quant(Quant::Univ, c, a) => write!(f, "[[{c}]]{a}"),
            Ast::Next(a) => write!(f, "X {a}"),
            Ast::Always(a) => write!(f, "G {a}"),
            Ast::Eventually(a) => write!(f, "F {a}"),
            Ast::Until(a, b) => write!(f, "({a} U {b})"),
            Ast::Release(a, b) => write!(f, "({a} R {b})"),
        }
    }
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn at(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn keyword(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Ident(s)) if matches!(s.as_str(), "T" | "X" | "G" | "F" | "U" | "R") => {
                Some(s.as_str())
            }
            _ => None,
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(syntax(self.at(), format!("expected {want}, found {t}"))),
            None => Err(syntax(
                self.at(),
                format!("expected {want}, found end of input"),
            )),
        }
    }

    fn descend(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(syntax(self.at(), "formula nested too deeply"));
        }
        Ok(())
    }

    fn or(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            let rhs = self.and()?;
            lhs = Ast::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.until()?;
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            let rhs = self.until()?;
            lhs = Ast::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Ast, ParseError> {
        self.descend()?;
        let lhs = self.unary()?;
        let out = match self.keyword() {
            Some("U") => {
                self.pos += 1;
                Ast::Until(Box::new(lhs), Box::new(self.until()?))
            }
            Some("R") => {
                self.pos += 1;
                Ast::Release(Box::new(lhs), Box::new(self.until()?))
            }
            _ => lhs,
        };
        self.depth -= 1;
        Ok(out)
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        self.descend()?;
        let out = self.unary_inner()?;
        self.depth -= 1;
        Ok(out)
    }

    fn unary_inner(&mut self) -> Result<Ast, ParseError> {
        match self.keyword() {
            Some("X") => {
                self.pos += 1;
                return Ok(Ast::Next(Box::new(self.unary()?)));
            }
            Some("G") => {
                self.pos += 1;
                return Ok(Ast::Always(Box::new(self.unary()?)));
            }
            Some("F") => {
                self.pos += 1;
                return Ok(Ast::Eventually(Box::new(self.unary()?)));
            }
            Some("T") => {
                self.pos += 1;
                return Ok(Ast::True);
            }
            Some(k) => {
                let k = k.to_string();
                return Err(syntax(self.at(), format!("unexpected operator `{k}`")));
            }
            None => {}
        }
        let at = self.at();
        match self.peek().cloned() {
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(Ast::Not(Box::new(self.unary()?)))
            }
            Some(Tok::LAngle) => {
                self.pos += 1;
                let c = self.agents()?;
                self.expect(Tok::RAngle)?;
                Ok(Ast::Quant(Quant::Exist, c, Box::new(self.until()?)))
            }
            Some(Tok::LBrack) => {
                self.pos += 1;
                let c = self.agents()?;
                self.expect(Tok::RBrack)?;
                Ok(Ast::Quant(Quant::Univ, c, Box::new(self.until()?)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.or()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Ast::Prop(name))
            }
            Some(t) => Err(syntax(at, format!("unexpected {t}"))),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }

    fn agents(&mut self) -> Result<Coalition, ParseError> {
        let mut agents = Vec::new();
        if let Some(Tok::Num(_)) = self.peek() {
            loop {
                match self.peek() {
                    Some(Tok::Num(0)) => {
                        return Err(syntax(self.at(), "agents are numbered from 1"))
                    }
                    Some(Tok::Num(n)) => {
                        agents.push(*n);
                        self.pos += 1;
                    }
                    _ => return Err(syntax(self.at(), "expected an agent number")),
                }
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        Ok(Coalition::new(agents))
    }
}

fn not_atl(ast: &Ast, reason: &str) -> ParseError {
    ParseError::NotAtlPlus {
        subformula: ast.to_string(),
        reason: reason.to_string(),
    }
}

fn to_state(ast: &Ast) -> Result<StateExpr, ParseError> {
    Ok(match ast {
        Ast::True => StateExpr::True,
        Ast::Prop(p) => StateExpr::Prop(p.clone()),
        Ast::Not(a) => StateExpr::Not(Box::new(to_state(a)?)),
        Ast::And(a, b) => StateExpr::And(Box::new(to_state(a)?), Box::new(to_state(b)?)),
        Ast::Or(a, b) => StateExpr::Or(Box::new(to_state(a)?), Box::new(to_state(b)?)),
        Ast::Quant(Quant::Exist, c, body) => StateExpr::Exist(c.clone(), Box::new(to_path(body)?)),
        Ast::Quant(Quant::Univ, c, body) => StateExpr::Univ(c.clone(), Box::new(to_path(body)?)),
        _ => {
            return Err(not_atl(
                ast,
                "temporal operator outside the scope of a coalition quantifier",
            ))
        }
    })
}

fn to_arg(ast: &Ast) -> Result<StateExpr, ParseError> {
    if ast.is_temporal() {
        return Err(not_atl(
            ast,
            "temporal operator nested under another without an intervening quantifier",
        ));
    }
    to_state(ast)
}

// Boolean combinations without a temporal operator are read as a single state
// formula, so the printed form of a formula parses back to the same tree.
fn to_path(ast: &Ast) -> Result<PathExpr, ParseError> {
    if !ast.has_path_temporal() {
        return Ok(PathExpr::State(to_state(ast)?));
    }
    Ok(match ast {
        Ast::Not(a) => PathExpr::Not(Box::new(to_path(a)?)),
        Ast::And(a, b) => PathExpr::And(Box::new(to_path(a)?), Box::new(to_path(b)?)),
        Ast::Or(a, b) => PathExpr::Or(Box::new(to_path(a)?), Box::new(to_path(b)?)),
        Ast::Next(a) => PathExpr::Next(to_arg(a)?),
        Ast::Always(a) => PathExpr::Always(to_arg(a)?),
        Ast::Eventually(a) => PathExpr::Until(StateExpr::True, to_arg(a)?),
        Ast::Until(a, b) => PathExpr::Until(to_arg(a)?, to_arg(b)?),
        Ast::Release(a, b) => PathExpr::Release(to_arg(a)?, to_arg(b)?),
        Ast::True | Ast::Prop(_) | Ast::Quant(..) => unreachable!("handled above"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::PathFormula;

    fn c(a: &[Agent]) -> Coalition {
        Coalition::new(a.iter().copied())
    }

    #[test]
    fn eventually_conjunction() {
        let f = parse("<<1>> (F q & F p)").unwrap();
        let expected = Formula::exist(
            c(&[1]),
            PathFormula::and(
                PathFormula::eventually(Formula::prop("q")),
                PathFormula::eventually(Formula::prop("p")),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn nested_temporal_rejected() {
        match parse("<<1>> G X p") {
            Err(ParseError::NotAtlPlus { subformula, .. }) => assert_eq!(subformula, "X p"),
            other => panic!("expected rejection, got {other:?}"),
        }
        assert!(matches!(
            parse("<<1>> X p U q"),
            Err(ParseError::NotAtlPlus { .. })
        ));
        assert!(matches!(parse("G p"), Err(ParseError::NotAtlPlus { .. })));
        assert!(matches!(
            parse("<<1>> (X p & q) U r"),
            Err(ParseError::NotAtlPlus { .. })
        ));
    }

    #[test]
    fn quantifier_scope() {
        let f = parse("<<1>> p U q").unwrap();
        assert_eq!(
            f,
            Formula::exist(
                c(&[1]),
                PathFormula::Until(Formula::prop("p"), Formula::prop("q"))
            )
        );
        let g = parse("<<1>> G p & q").unwrap();
        assert!(matches!(g, Formula::And(..)));
        let h = parse("[[1,2]] X pos2").unwrap();
        assert_eq!(
            h,
            Formula::univ(c(&[1, 2]), PathFormula::Next(Formula::prop("pos2")))
        );
    }

    #[test]
    fn nested_quantifier_in_until() {
        let f = parse("<<2>>(<<1>>F p) U r").unwrap();
        let inner = Formula::exist(c(&[1]), PathFormula::eventually(Formula::prop("p")));
        assert_eq!(
            f,
            Formula::exist(c(&[2]), PathFormula::Until(inner, Formula::prop("r")))
        );
    }

    #[test]
    fn empty_coalition_and_negation() {
        let f = parse("~<<>> G ~p").unwrap();
        assert_eq!(
            f,
            Formula::univ(
                Coalition::empty(),
                PathFormula::eventually(Formula::prop("p"))
            )
        );
    }

    #[test]
    fn syntax_errors() {
        for bad in [
            "",
            "p &",
            "<<1> p",
            "((p)",
            "p q",
            "<<0>> X p",
            "p $ q",
            "<<1>> U p",
            "[[a]] X p",
        ] {
            assert!(
                matches!(parse(bad), Err(ParseError::Syntax { .. })),
                "{bad:?} should be a syntax error"
            );
        }
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let text = format!("{}p{}", "(".repeat(10_000), ")".repeat(10_000));
        assert!(parse(&text).is_err());
        let tildes = format!("{}p", "~".repeat(10_000));
        assert!(parse(&tildes).is_err());
    }

    #[test]
    fn display_reparses() {
        for text in [
            "<<1>> (F q & F p)",
            "[[1,2]] (p U (q & ~r))",
            "<<1>> (G p | X <<2>> G q)",
            "~T | <<>> p",
            "<<1>> ~(p U q)",
            "[[2]] (p R q)",
            "<<1>> (p & q)",
            "<<1>> (~(p | q) & G r)",
            "[[1]] (<<2>> X p) U q",
        ] {
            let f = parse(text).unwrap();
            assert_eq!(parse(&f.to_string()).unwrap(), f, "{text}");
        }
    }
}
