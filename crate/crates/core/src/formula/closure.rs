use std::collections::HashSet;

use super::{classify, Formula, FormulaKind};
use crate::decomposition::analyze;

/// Every formula that can appear in a clause of a proof for `root`, in order
/// of discovery. Always contains `T`.
pub fn closure(root: &Formula) -> Vec<Formula> {
    let mut seen: HashSet<Formula> = HashSet::new();
    let mut order = Vec::new();
    let mut work = vec![Formula::True, root.clone()];
    while let Some(f) = work.pop() {
        if !seen.insert(f.clone()) {
            continue;
        }
        match classify(&f) {
            FormulaKind::Literal => {}
            FormulaKind::Alpha(a, b) | FormulaKind::Beta(a, b) => {
                work.push(b.clone());
                work.push(a.clone());
            }
            FormulaKind::PrimitiveSuccessor { successor, .. } => work.push(successor.clone()),
            FormulaKind::Gamma { .. } => {
                let clauses = analyze(&f, false).expect("gamma formula");
                for atom in clauses.into_iter().flatten().rev() {
                    work.push(atom);
                }
            }
        }
        order.push(f);
    }
    order
}
