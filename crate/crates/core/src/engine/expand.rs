//! One rule application on an interned clause.
//!
//! Every child assertion carries the positions of the parent assertions it
//! came from. The cycle check follows these links.

use std::collections::{BTreeMap, HashMap};

use super::table::{Asn, Kind, Table};
use super::{CheckError, Rule};
use crate::cgm::ModelProvider;
use crate::cnf::{and_cnf, dnf_to_cnf, or_cnf, remove_subsumed, Cnf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChildClause {
    pub asns: Vec<Asn>,
    /// `links[i]`: parent positions that produced `asns[i]`.
    pub links: Vec<Vec<u32>>,
}

impl ChildClause {
    fn from_pairs(mut pairs: Vec<(Asn, u32)>) -> ChildClause {
        pairs.sort_unstable();
        pairs.dedup();
        let mut asns: Vec<Asn> = Vec::with_capacity(pairs.len());
        let mut links: Vec<Vec<u32>> = Vec::with_capacity(pairs.len());
        for (a, p) in pairs {
            if asns.last() == Some(&a) {
                links.last_mut().expect("parallel").push(p);
            } else {
                asns.push(a);
                links.push(vec![p]);
            }
        }
        ChildClause { asns, links }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Choice {
    True,
    False,
    /// Position of the principal assertion.
    Complex(usize),
    Next,
}

/// Literal rules first, then the complex assertion expanded least recently
/// on the path (`history` lists the path's principals, oldest first), then
/// the next rule.
pub fn select<P: ModelProvider>(
    table: &mut Table<'_, P>,
    clause: &[Asn],
    history: &[Option<Asn>],
) -> Result<Choice, CheckError> {
    let mut any_literal = false;
    let mut complex = Vec::new();
    for (i, &a) in clause.iter().enumerate() {
        match table.kind(a.1) {
            Kind::Literal => {
                if table.literal_holds(a)? {
                    return Ok(Choice::True);
                }
                any_literal = true;
            }
            Kind::Alpha(..) | Kind::Beta(..) | Kind::Gamma { .. } => complex.push(i),
            Kind::Successor { .. } => {}
        }
    }
    if any_literal {
        return Ok(Choice::False);
    }
    if complex.is_empty() {
        return Ok(Choice::Next);
    }
    // Most recent expansion depth of each candidate; never expanded wins.
    let mut last: Vec<Option<usize>> = vec![None; complex.len()];
    let mut missing = complex.len();
    for (depth, p) in history.iter().enumerate().rev() {
        let Some(p) = p else { continue };
        if let Some(k) = complex.iter().position(|&i| clause[i] == *p) {
            if last[k].is_none() {
                last[k] = Some(depth);
                missing -= 1;
                if missing == 0 {
                    break;
                }
            }
        }
    }
    let k = match last.iter().position(Option::is_none) {
        Some(k) => k,
        None => (0..complex.len())
            .min_by_key(|&k| last[k])
            .expect("non-empty"),
    };
    Ok(Choice::Complex(complex[k]))
}

/// Clause without its false literals. Only valid when no literal holds.
pub fn drop_literals<P: ModelProvider>(table: &Table<'_, P>, clause: &[Asn]) -> ChildClause {
    let pairs = clause
        .iter()
        .enumerate()
        .filter(|(_, a)| !matches!(table.kind(a.1), Kind::Literal))
        .map(|(i, &a)| (a, i as u32))
        .collect();
    ChildClause::from_pairs(pairs)
}

/// `clause` with the principal at position `p` replaced by `new` formulas
/// at the same state.
fn replace(clause: &[Asn], p: usize, new: &[u32]) -> ChildClause {
    let s = clause[p].0;
    let mut pairs: Vec<(Asn, u32)> = clause
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != p)
        .map(|(i, &a)| (a, i as u32))
        .collect();
    pairs.extend(new.iter().map(|&f| ((s, f), p as u32)));
    ChildClause::from_pairs(pairs)
}

/// Children of the alpha, beta or gamma rule on position `p`, plus the rule
/// name. A gamma formula whose analysis is empty has no children (it holds).
pub fn complex<P: ModelProvider>(
    table: &mut Table<'_, P>,
    clause: &[Asn],
    p: usize,
) -> Result<(Rule, Vec<ChildClause>), CheckError> {
    let f = clause[p].1;
    match table.kind(f).clone() {
        Kind::Alpha(a, b) => Ok((
            Rule::Alpha,
            vec![replace(clause, p, &[a]), replace(clause, p, &[b])],
        )),
        Kind::Beta(a, b) => Ok((Rule::Beta, vec![replace(clause, p, &[a, b])])),
        Kind::Gamma { .. } => {
            let analysis = table.analysis(f)?;
            Ok((
                Rule::Gamma,
                analysis.iter().map(|c| replace(clause, p, c)).collect(),
            ))
        }
        _ => Err(CheckError::Invariant(format!(
            "`{}` is not complex",
            table.get(f)
        ))),
    }
}

/// Children of the next rule: one per clause of the disjunction, over all
/// successor assertions, of their one-step expansions.
pub fn next<P: ModelProvider>(
    table: &mut Table<'_, P>,
    clause: &[Asn],
    subsumption: bool,
) -> Result<Vec<ChildClause>, CheckError> {
    let mut pre: Option<Cnf<(Asn, u32)>> = None;
    for (j, &(s, f)) in clause.iter().enumerate() {
        let Kind::Successor {
            universal,
            coalition,
            next,
        } = table.kind(f).clone()
        else {
            return Err(CheckError::Invariant(format!(
                "`{}` is not a successor",
                table.get(f)
            )));
        };
        let groups = table.moves(s, &coalition)?;
        let tagged: Vec<Vec<(Asn, u32)>> = groups
            .iter()
            .map(|targets| targets.iter().map(|&t| ((t, next), j as u32)).collect())
            .collect();
        let cnf = if universal {
            // every coalition move has a completion reaching the successor
            and_cnf(&Vec::new(), &tagged)
        } else {
            dnf_to_cnf(&tagged, false)
        };
        pre = Some(match pre {
            None => cnf,
            Some(acc) => or_cnf(&acc, &cnf, false),
        });
    }
    let pre = pre.ok_or_else(|| CheckError::Invariant("next rule on an empty clause".into()))?;

    let mut order: Vec<Vec<Asn>> = Vec::new();
    let mut merged: HashMap<Vec<Asn>, BTreeMap<Asn, Vec<u32>>> = HashMap::new();
    for c in pre {
        let mut by_asn: BTreeMap<Asn, Vec<u32>> = BTreeMap::new();
        for (a, j) in c {
            by_asn.entry(a).or_default().push(j);
        }
        let key: Vec<Asn> = by_asn.keys().copied().collect();
        match merged.get_mut(&key) {
            Some(m) => {
                for (a, js) in by_asn {
                    m.entry(a).or_default().extend(js);
                }
            }
            None => {
                order.push(key.clone());
                merged.insert(key, by_asn);
            }
        }
    }
    if subsumption {
        remove_subsumed(&mut order);
    }
    Ok(order
        .into_iter()
        .map(|key| {
            let m = merged.remove(&key).expect("merged clause");
            let pairs = m
                .into_iter()
                .flat_map(|(a, js)| js.into_iter().map(move |j| (a, j)))
                .collect();
            ChildClause::from_pairs(pairs)
        })
        .collect())
}
