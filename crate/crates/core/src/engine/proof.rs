//! Retained candidate proofs and their exports.

use std::fmt::{self, Write as _};

use serde::Serialize;

use super::scc::tarjan;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    True,
    False,
    Alpha,
    Beta,
    Gamma,
    Next,
    /// The `T` leaf below a true literal, or below a gamma with no clauses.
    LeafTrue,
    /// The empty clause.
    LeafEmpty,
    /// Verdict reused from an earlier identical subtree.
    Memo,
    /// Created but never expanded (the search stopped first).
    Unexpanded,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::True => "true",
            Rule::False => "false",
            Rule::Alpha => "alpha",
            Rule::Beta => "beta",
            Rule::Gamma => "gamma",
            Rule::Next => "next",
            Rule::LeafTrue => "leaf_true",
            Rule::LeafEmpty => "leaf_empty",
            Rule::Memo => "memo",
            Rule::Unexpanded => "unexpanded",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    True,
    False,
    Pending,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RenderedAssertion {
    pub state: String,
    pub formula: String,
}

impl fmt::Display for RenderedAssertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {}", self.state, self.formula)
    }
}

pub fn render_clause(clause: &[RenderedAssertion]) -> String {
    if clause.is_empty() {
        return "{}".into();
    }
    let items: Vec<String> = clause.iter().map(ToString::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

#[derive(Clone, Debug, Serialize)]
pub struct ProofNode {
    pub id: usize,
    pub rule: Rule,
    pub principal: Option<RenderedAssertion>,
    pub clause: Vec<RenderedAssertion>,
    /// Tree children followed by back-edge targets, in creation order.
    pub children: Vec<usize>,
    pub back_edges: Vec<usize>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProofGraph {
    pub root: usize,
    pub nodes: Vec<ProofNode>,
}

impl ProofGraph {
    pub fn node(&self, id: usize) -> &ProofNode {
        &self.nodes[id - 1]
    }

    pub fn back_edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.back_edges.len()).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("proof graph serializes")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph proof {\n  node [shape=box, fontname=monospace];\n");
        for n in &self.nodes {
            let label = match n.rule {
                Rule::LeafTrue => "T".to_string(),
                Rule::LeafEmpty => "{}".to_string(),
                _ => render_clause(&n.clause),
            };
            let color = match n.verdict {
                Verdict::True => "darkgreen",
                Verdict::False => "red",
                Verdict::Pending => "gray",
            };
            let _ = writeln!(
                out,
                "  n{} [label=\"{}: {}\\n[{}]\", color={}];",
                n.id,
                n.id,
                escape(&label),
                n.rule,
                color
            );
        }
        for n in &self.nodes {
            for &c in &n.children {
                if n.back_edges.contains(&c) {
                    continue;
                }
                let _ = writeln!(out, "  n{} -> n{};", n.id, c);
            }
            for &b in &n.back_edges {
                let _ = writeln!(
                    out,
                    "  n{} -> n{} [style=dashed, constraint=false];",
                    n.id, b
                );
            }
        }
        out.push_str("}\n");
        out
    }

    /// Component of each vertex and the first vertex, in creation order, of
    /// each component.
    fn components(&self) -> (Vec<usize>, Vec<usize>) {
        let adj: Vec<Vec<usize>> = self
            .nodes
            .iter()
            .map(|n| n.children.iter().map(|c| c - 1).collect())
            .collect();
        let comp = tarjan(&adj);
        let mut first = vec![usize::MAX; adj.len()];
        for (v, &c) in comp.iter().enumerate() {
            first[c] = first[c].min(v);
        }
        (comp, first)
    }

    /// First vertices of cyclic strongly connected components that no back
    /// edge points at. Always empty for a well-formed search.
    pub fn unentered_components(&self) -> Vec<usize> {
        let (comp, first) = self.components();
        let mut cyclic = vec![false; first.len()];
        let mut entered = vec![false; first.len()];
        for n in &self.nodes {
            for &b in &n.back_edges {
                cyclic[comp[b - 1]] = true;
                entered[b - 1] = true;
            }
        }
        (0..first.len())
            .filter(|&c| cyclic[c] && !entered[first[c]])
            .map(|c| first[c] + 1)
            .collect()
    }

    /// Back edges `(from, to)` whose target is not the first vertex of its
    /// strongly connected component. This happens when a cycle sits inside a
    /// larger one that closes higher up the path.
    pub fn nested_back_edges(&self) -> Vec<(usize, usize)> {
        let (comp, first) = self.components();
        let mut out = Vec::new();
        for n in &self.nodes {
            for &b in &n.back_edges {
                if first[comp[b - 1]] != b - 1 {
                    out.push((n.id, b));
                }
            }
        }
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
