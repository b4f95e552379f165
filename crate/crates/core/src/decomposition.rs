//! Splitting a path formula into what must hold now and what must hold from
//! the next state on.
//!
//! `dec(P)` is a list of pairs `<present, future>`. `P` holds on a path iff
//! for some pair the present formula holds at the first state and the future
//! path formula holds on the rest of the path (no future means no obligation).

use thiserror::Error;

use crate::cnf::{dnf_to_cnf, Cnf};
use crate::formula::{classify, Formula, FormulaKind, PathFormula};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecPair {
    /// Conjuncts of the present part, never containing `T`.
    pub present: Vec<Formula>,
    pub future: Option<PathFormula>,
}

impl DecPair {
    fn now(f: &Formula) -> Vec<Formula> {
        if *f == Formula::True {
            Vec::new()
        } else {
            vec![f.clone()]
        }
    }

    /// The present part as one formula.
    pub fn present_formula(&self) -> Formula {
        conjoin(&self.present)
    }
}

fn conjoin(parts: &[Formula]) -> Formula {
    let mut it = parts.iter().cloned();
    match it.next() {
        None => Formula::True,
        Some(first) => it.fold(first, Formula::and),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("`{0}` is not a quantified formula that the gamma rule expands")]
    NotGamma(String),
}

fn push_unique(out: &mut Vec<DecPair>, pair: DecPair) {
    if !out.contains(&pair) {
        out.push(pair);
    }
}

/// Pairwise conjunction of two decompositions.
pub fn otimes(a: &[DecPair], b: &[DecPair]) -> Vec<DecPair> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            let mut present = x.present.clone();
            present.extend(y.present.iter().cloned());
            let future = match (&x.future, &y.future) {
                (None, f) | (f, None) => f.clone(),
                (Some(f), Some(g)) => Some(PathFormula::and(f.clone(), g.clone())),
            };
            push_unique(&mut out, DecPair { present, future });
        }
    }
    out
}

/// Pairs whose futures are both non-trivial, with the futures joined by `|`.
pub fn oplus(a: &[DecPair], b: &[DecPair]) -> Vec<DecPair> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            if let (Some(f), Some(g)) = (&x.future, &y.future) {
                let mut present = x.present.clone();
                present.extend(y.present.iter().cloned());
                let future = Some(PathFormula::or(f.clone(), g.clone()));
                push_unique(&mut out, DecPair { present, future });
            }
        }
    }
    out
}

pub fn dec(p: &PathFormula) -> Vec<DecPair> {
    match p {
        PathFormula::State(f) => vec![DecPair {
            present: DecPair::now(f),
            future: None,
        }],
        PathFormula::Next(f) => vec![DecPair {
            present: Vec::new(),
            future: Some(PathFormula::State(f.clone())),
        }],
        PathFormula::Always(f) => vec![DecPair {
            present: DecPair::now(f),
            future: Some(p.clone()),
        }],
        PathFormula::Until(a, b) => vec![
            DecPair {
                present: DecPair::now(a),
                future: Some(p.clone()),
            },
            DecPair {
                present: DecPair::now(b),
                future: None,
            },
        ],
        PathFormula::And(a, b) => otimes(&dec(a), &dec(b)),
        PathFormula::Or(a, b) => {
            let (da, db) = (dec(a), dec(b));
            let mut out = Vec::new();
            for pair in da.iter().chain(&db).cloned().chain(oplus(&da, &db)) {
                push_unique(&mut out, pair);
            }
            out
        }
    }
}

fn gamma_parts(theta: &Formula) -> Result<Vec<Vec<Formula>>, DecompositionError> {
    let FormulaKind::Gamma {
        quant,
        coalition,
        body,
    } = classify(theta)
    else {
        return Err(DecompositionError::NotGamma(theta.to_string()));
    };
    Ok(dec(body)
        .into_iter()
        .map(|pair| {
            let mut atoms = pair.present;
            if let Some(future) = pair.future {
                let again = Formula::quantified(quant, coalition.clone(), future);
                let step = Formula::quantified(quant, coalition.clone(), PathFormula::Next(again));
                atoms.push(step);
            }
            atoms
        })
        .collect())
}

/// The disjuncts that a gamma formula unfolds into.
pub fn gamma_components(theta: &Formula) -> Result<Vec<Formula>, DecompositionError> {
    Ok(gamma_parts(theta)?
        .iter()
        .map(|atoms| conjoin(atoms))
        .collect())
}

/// Clause form of the disjunction of the gamma components. Each clause
/// becomes one child of a gamma expansion.
pub fn analyze(theta: &Formula, subsumption: bool) -> Result<Cnf<Formula>, DecompositionError> {
    Ok(dnf_to_cnf(&gamma_parts(theta)?, subsumption))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Coalition};

    fn p(s: &str) -> Formula {
        Formula::prop(s)
    }

    fn f(text: &str) -> Formula {
        parse(text).unwrap()
    }

    fn body(text: &str) -> PathFormula {
        match f(text) {
            Formula::Exist(_, b) | Formula::Univ(_, b) => *b,
            other => panic!("{other} is not quantified"),
        }
    }

    fn as_sets(cnf: &Cnf<Formula>) -> Vec<Vec<String>> {
        let mut v: Vec<Vec<String>> = cnf
            .iter()
            .map(|c| {
                let mut c: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                c.sort();
                c
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn dec_of_eventually_pair() {
        let d = dec(&body("<<1>> (F q & F p)"));
        let ev = |x: &str| PathFormula::eventually(p(x));
        assert_eq!(
            d,
            vec![
                DecPair {
                    present: vec![],
                    future: Some(PathFormula::and(ev("q"), ev("p")))
                },
                DecPair {
                    present: vec![p("p")],
                    future: Some(ev("q"))
                },
                DecPair {
                    present: vec![p("q")],
                    future: Some(ev("p"))
                },
                DecPair {
                    present: vec![p("q"), p("p")],
                    future: None
                },
            ]
        );
    }

    #[test]
    fn dec_of_disjunction_includes_oplus() {
        let d = dec(&body("<<1>> (G p | G q)"));
        assert_eq!(d.len(), 3);
        assert_eq!(d[2].present, vec![p("p"), p("q")]);
        assert!(matches!(d[2].future, Some(PathFormula::Or(..))));
    }

    #[test]
    fn oplus_skips_finished_futures() {
        let a = dec(&body("<<1>> p U q"));
        let b = dec(&body("<<1>> r U s"));
        assert_eq!(oplus(&a, &b).len(), 1);
        assert_eq!(otimes(&a, &b).len(), 4);
    }

    #[test]
    fn until_analysis() {
        let theta = f("<<1>> p U q");
        let x = f("<<1>> X <<1>> p U q");
        let expected = vec![vec![p("p"), p("q")], vec![x.clone(), p("q")]];
        assert_eq!(
            as_sets(&analyze(&theta, false).unwrap()),
            as_sets(&expected)
        );
        assert_eq!(
            gamma_components(&theta).unwrap(),
            vec![Formula::and(p("p"), x), p("q")]
        );
    }

    #[test]
    fn box_analysis() {
        let theta = f("<<1>> G psi");
        let x = f("<<1>> X <<1>> G psi");
        assert_eq!(
            analyze(&theta, false).unwrap(),
            vec![vec![p("psi")], vec![x]]
        );
    }

    #[test]
    fn eventually_analysis_single_clause() {
        let theta = f("<<1>> F ~p");
        let x = f("<<1>> X <<1>> F ~p");
        assert_eq!(
            analyze(&theta, false).unwrap(),
            vec![vec![x, Formula::neg_prop("p")]]
        );
    }

    #[test]
    fn state_body_collapses() {
        let theta = f("[[2]] (p & q)");
        assert_eq!(
            analyze(&theta, false).unwrap(),
            vec![vec![Formula::and(p("p"), p("q"))]]
        );
        assert!(analyze(&f("<<1>> T"), false).unwrap().is_empty());
    }

    #[test]
    fn next_inside_conjunction_keeps_quantified_future() {
        let theta = f("<<1>> (X p & G q)");
        let comps = gamma_components(&theta).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].to_string(), "(q & <<1>>X <<1>>(p & G q))");
    }

    #[test]
    fn universal_components_stay_universal() {
        let theta = Formula::univ(Coalition::new([1]), PathFormula::Always(p("p")));
        let comps = gamma_components(&theta).unwrap();
        assert_eq!(comps[0].to_string(), "(p & [[1]]X [[1]]G p)");
    }

    #[test]
    fn non_gamma_rejected() {
        assert!(analyze(&f("<<1>> X p"), false).is_err());
        assert!(analyze(&p("p"), false).is_err());
    }
}
