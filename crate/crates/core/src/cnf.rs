//! Clause sets over opaque atoms.
//!
//! A CNF is a list of clauses. The empty list is true and a list holding one
//! empty clause is false. Atoms inside a clause keep the order in which they
//! were first added.

use std::collections::HashSet;
use std::hash::Hash;

pub type Cnf<A> = Vec<Vec<A>>;

pub fn falsum<A>() -> Cnf<A> {
    vec![Vec::new()]
}

/// Disjunction of two clause sets, by distribution.
pub fn or_cnf<A: Clone + Ord + Hash>(a: &Cnf<A>, b: &Cnf<A>, subsumption: bool) -> Cnf<A> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    let mut seen = HashSet::new();
    for ca in a {
        for cb in b {
            let mut clause = ca.clone();
            for atom in cb {
                if !clause.contains(atom) {
                    clause.push(atom.clone());
                }
            }
            push_unique(&mut out, &mut seen, clause);
        }
    }
    if subsumption {
        remove_subsumed(&mut out);
    }
    out
}

/// Conjunction of two clause sets.
pub fn and_cnf<A: Clone + Ord + Hash>(a: &Cnf<A>, b: &Cnf<A>) -> Cnf<A> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut seen = HashSet::new();
    for c in a.iter().chain(b) {
        push_unique(&mut out, &mut seen, c.clone());
    }
    out
}

/// Clause form of a disjunction of conjunctive terms.
pub fn dnf_to_cnf<A: Clone + Ord + Hash>(terms: &[Vec<A>], subsumption: bool) -> Cnf<A> {
    let mut acc = falsum();
    for term in terms {
        let units: Cnf<A> = dedup_atoms(term).into_iter().map(|a| vec![a]).collect();
        acc = or_cnf(&acc, &units, subsumption);
        if acc.is_empty() {
            break;
        }
    }
    acc
}

fn dedup_atoms<A: Clone + PartialEq>(atoms: &[A]) -> Vec<A> {
    let mut out: Vec<A> = Vec::with_capacity(atoms.len());
    for a in atoms {
        if !out.contains(a) {
            out.push(a.clone());
        }
    }
    out
}

fn push_unique<A: Clone + Ord + Hash>(
    out: &mut Cnf<A>,
    seen: &mut HashSet<Vec<A>>,
    clause: Vec<A>,
) {
    let mut key = clause.clone();
    key.sort();
    if seen.insert(key) {
        out.push(clause);
    }
}

/// Drops every clause that contains another clause of the set.
pub fn remove_subsumed<A: Ord + Clone>(clauses: &mut Cnf<A>) {
    let sorted: Vec<Vec<A>> = clauses
        .iter()
        .map(|c| {
            let mut s = c.clone();
            s.sort();
            s
        })
        .collect();
    let keep: Vec<bool> = (0..sorted.len())
        .map(|i| {
            !(0..sorted.len()).any(|j| {
                j != i
                    && is_subset(&sorted[j], &sorted[i])
                    && (sorted[j].len() < sorted[i].len() || j < i)
            })
        })
        .collect();
    let mut k = keep.iter();
    clauses.retain(|_| *k.next().unwrap());
}

fn is_subset<A: Ord>(small: &[A], big: &[A]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.by_ref().any(|y| y == x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distributes_terms() {
        // (a & b) | c  ==  (a | c) & (b | c)
        let cnf = dnf_to_cnf(&[vec!['a', 'b'], vec!['c']], false);
        assert_eq!(cnf, vec![vec!['a', 'c'], vec!['b', 'c']]);
    }

    #[test]
    fn empty_term_is_true_and_no_terms_false() {
        assert!(dnf_to_cnf(&[vec!['a'], vec![]], false).is_empty());
        assert_eq!(dnf_to_cnf::<char>(&[], false), falsum());
    }

    #[test]
    fn duplicate_atoms_and_clauses_removed() {
        let cnf = dnf_to_cnf(&[vec!['a', 'a'], vec!['a', 'b']], false);
        // (a) | (a & b) gives a, (a | b)
        assert_eq!(cnf, vec![vec!['a'], vec!['a', 'b']]);
        let mut s = cnf.clone();
        remove_subsumed(&mut s);
        assert_eq!(s, vec![vec!['a']]);
    }

    #[test]
    fn subset_check() {
        assert!(is_subset(&[1, 3], &[1, 2, 3]));
        assert!(!is_subset(&[1, 4], &[1, 2, 3]));
        assert!(is_subset::<i32>(&[], &[1]));
    }

    #[test]
    fn equal_clauses_keep_first_under_subsumption() {
        let mut s = vec![vec![2, 1], vec![1, 2], vec![3]];
        remove_subsumed(&mut s);
        assert_eq!(s, vec![vec![2, 1], vec![3]]);
    }
}
