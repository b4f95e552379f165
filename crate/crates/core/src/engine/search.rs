//! Depth-first construction of the candidate proof.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use super::expand::{self, ChildClause, Choice};
use super::proof::{ProofGraph, ProofNode, RenderedAssertion, Rule, Verdict};
use super::scc::tarjan;
use super::table::{Asn, Kind, Table};
use super::{CheckError, CheckOptions, CyclePolicy, Stats, Witness, WitnessStep};
use crate::cgm::ModelProvider;

type Clause = Rc<[Asn]>;

enum Child {
    Open {
        id: usize,
        clause: Clause,
        links: Vec<Vec<u32>>,
    },
    Leaf {
        holds: bool,
        id: usize,
    },
    Back {
        depth: usize,
        links: Vec<Vec<u32>>,
    },
}

struct Frame {
    id: usize,
    clause: Clause,
    links: Vec<Vec<u32>>,
    principal: Option<Asn>,
    children: Option<Vec<Child>>,
    next: usize,
    ok: bool,
    // shallowest back-edge target seen in this subtree
    low: usize,
}

struct NodeRec {
    clause: Clause,
    rule: Rule,
    principal: Option<Asn>,
    children: Vec<usize>,
    back_edges: Vec<usize>,
    verdict: Verdict,
}

struct RawWitness {
    path: Vec<(usize, Clause)>,
    back_edge_to: Option<usize>,
}

pub(super) struct Search<'a, 'p, P: ModelProvider> {
    table: &'a mut Table<'p, P>,
    opts: &'a CheckOptions,
    stack: Vec<Frame>,
    on_path: HashMap<Clause, usize>,
    distinct: HashSet<Clause>,
    memo: HashMap<Clause, bool>,
    nodes: Vec<NodeRec>,
    created: usize,
    stats: Stats,
    witness: Option<RawWitness>,
}

pub(super) struct Outcome {
    pub verdict: bool,
    pub stats: Stats,
    pub witness: Option<Witness>,
    pub proof: Option<ProofGraph>,
}

impl<'a, 'p, P: ModelProvider> Search<'a, 'p, P> {
    pub fn new(table: &'a mut Table<'p, P>, opts: &'a CheckOptions) -> Self {
        Search {
            table,
            opts,
            stack: Vec::new(),
            on_path: HashMap::new(),
            distinct: HashSet::new(),
            memo: HashMap::new(),
            nodes: Vec::new(),
            created: 0,
            stats: Stats::default(),
            witness: None,
        }
    }

    fn create(&mut self, clause: Clause, rule: Rule) -> Result<usize, CheckError> {
        self.created += 1;
        if self.created > self.opts.node_budget {
            return Err(CheckError::BudgetExceeded {
                budget: self.opts.node_budget,
            });
        }
        if !matches!(rule, Rule::LeafTrue | Rule::LeafEmpty) {
            self.distinct.insert(clause.clone());
        }
        if self.opts.retain_proof {
            let verdict = match rule {
                Rule::LeafTrue => Verdict::True,
                Rule::LeafEmpty => Verdict::False,
                _ => Verdict::Pending,
            };
            self.nodes.push(NodeRec {
                clause,
                rule,
                principal: None,
                children: Vec::new(),
                back_edges: Vec::new(),
                verdict,
            });
        }
        Ok(self.created)
    }

    fn push(&mut self, id: usize, clause: Clause, links: Vec<Vec<u32>>) -> Result<(), CheckError> {
        if self.opts.verify_invariants && self.on_path.contains_key(&clause) {
            return Err(CheckError::Invariant(format!(
                "clause of node {id} repeats on its path"
            )));
        }
        self.on_path.insert(clause.clone(), self.stack.len());
        self.stack.push(Frame {
            id,
            clause,
            links,
            principal: None,
            children: None,
            next: 0,
            ok: true,
            low: usize::MAX,
        });
        self.stats.max_depth = self.stats.max_depth.max(self.stack.len());
        Ok(())
    }

    pub fn run(mut self, root: Asn) -> Result<Outcome, CheckError> {
        let clause: Clause = Rc::from(vec![root]);
        let id = self.create(clause.clone(), Rule::Unexpanded)?;
        self.push(id, clause, Vec::new())?;

        let verdict = loop {
            let top = self.stack.len() - 1;
            if self.stack[top].children.is_none() {
                self.expand(top)?;
            }
            let frame = &mut self.stack[top];
            let children = frame.children.as_mut().expect("expanded");
            if frame.next < children.len() {
                let child = std::mem::replace(
                    &mut children[frame.next],
                    Child::Leaf { holds: true, id: 0 },
                );
                frame.next += 1;
                match child {
                    Child::Open { id, clause, links } => self.push(id, clause, links)?,
                    Child::Leaf { holds, id } => {
                        if !holds {
                            self.fail(Some(id), None);
                            if self.opts.early_abort {
                                break false;
                            }
                        }
                    }
                    Child::Back { depth, links } => {
                        self.stats.back_edges += 1;
                        self.stack[top].low = self.stack[top].low.min(depth);
                        if !self.cycle_holds(depth, &links) {
                            let target = self.stack[depth].id;
                            self.fail(None, Some(target));
                            if self.opts.early_abort {
                                break false;
                            }
                        }
                    }
                }
                continue;
            }

            let frame = self.stack.pop().expect("non-empty stack");
            self.on_path.remove(&frame.clause);
            self.set_verdict(frame.id, frame.ok);
            // Cycles closing inside the subtree make it a proof of its own
            // root clause; cycles closing above make it depend on the path.
            if self.opts.memoize && frame.low >= self.stack.len() {
                self.memo.insert(frame.clause.clone(), frame.ok);
            }
            match self.stack.last_mut() {
                Some(parent) => {
                    parent.ok &= frame.ok;
                    parent.low = parent.low.min(frame.low);
                }
                None => break frame.ok,
            }
        };

        // Stopped early: everything still on the path contains the failure.
        let open: Vec<usize> = self.stack.iter().map(|f| f.id).collect();
        for id in open {
            self.set_verdict(id, false);
        }

        self.stats.nodes = self.created;
        self.stats.distinct_clauses = self.distinct.len();
        self.stats.states_materialized = self.table.states.len();
        if self.opts.verify_invariants {
            self.check_clause_bound()?;
        }
        let witness = self.witness.take().map(|w| Witness {
            steps: w
                .path
                .iter()
                .map(|(id, c)| WitnessStep {
                    node: *id,
                    clause: self.render(c),
                })
                .collect(),
            back_edge_to: w.back_edge_to,
        });
        let proof = self.opts.retain_proof.then(|| self.graph());
        Ok(Outcome {
            verdict,
            stats: self.stats,
            witness,
            proof,
        })
    }

    fn set_verdict(&mut self, id: usize, ok: bool) {
        if let Some(n) = self.nodes.get_mut(id - 1) {
            n.verdict = if ok { Verdict::True } else { Verdict::False };
        }
    }

    fn fail(&mut self, leaf: Option<usize>, back_edge_to: Option<usize>) {
        let top = self.stack.len() - 1;
        self.stack[top].ok = false;
        if self.witness.is_some() {
            return;
        }
        let mut path: Vec<(usize, Clause)> = self
            .stack
            .iter()
            .map(|f| (f.id, f.clause.clone()))
            .collect();
        if let Some(id) = leaf {
            path.push((id, Rc::from(Vec::new())));
        }
        self.witness = Some(RawWitness { path, back_edge_to });
    }

    fn expand(&mut self, top: usize) -> Result<(), CheckError> {
        self.stats.expansions += 1;
        let clause = self.stack[top].clause.clone();
        let history: Vec<Option<Asn>> = self.stack[..top].iter().map(|f| f.principal).collect();
        let choice = expand::select(self.table, &clause, &history)?;
        let (rule, principal, clauses) = match choice {
            Choice::True => (Rule::True, None, None),
            Choice::False => (
                Rule::False,
                None,
                Some(vec![expand::drop_literals(self.table, &clause)]),
            ),
            Choice::Complex(p) => {
                let (rule, cs) = expand::complex(self.table, &clause, p)?;
                (rule, Some(clause[p]), Some(cs))
            }
            Choice::Next => (
                Rule::Next,
                None,
                Some(expand::next(self.table, &clause, self.opts.subsumption)?),
            ),
        };
        self.stack[top].principal = principal;

        let mut children = Vec::new();
        match clauses {
            // true literal, or a gamma formula equivalent to true
            None => children.push(self.leaf(true)?),
            Some(cs) if cs.is_empty() => children.push(self.leaf(true)?),
            Some(cs) => {
                for ChildClause { asns, links } in cs {
                    children.push(self.child(asns, links)?);
                }
            }
        }

        let id = self.stack[top].id;
        if let Some(n) = self.nodes.get_mut(id - 1) {
            n.rule = rule;
            n.principal = principal;
            for c in &children {
                match c {
                    Child::Open { id, .. } | Child::Leaf { id, .. } => n.children.push(*id),
                    Child::Back { depth, .. } => {
                        let target = self.stack[*depth].id;
                        n.children.push(target);
                        n.back_edges.push(target);
                    }
                }
            }
        }
        self.stack[top].children = Some(children);
        Ok(())
    }

    fn leaf(&mut self, holds: bool) -> Result<Child, CheckError> {
        let rule = if holds {
            Rule::LeafTrue
        } else {
            Rule::LeafEmpty
        };
        let id = self.create(Rc::from(Vec::new()), rule)?;
        Ok(Child::Leaf { holds, id })
    }

    fn child(&mut self, asns: Vec<Asn>, links: Vec<Vec<u32>>) -> Result<Child, CheckError> {
        if asns.is_empty() {
            return self.leaf(false);
        }
        let clause: Clause = Rc::from(asns);
        if let Some(&depth) = self.on_path.get(&clause) {
            return Ok(Child::Back { depth, links });
        }
        if self.opts.memoize {
            if let Some(&holds) = self.memo.get(&clause) {
                let id = self.create(clause, Rule::Memo)?;
                if let Some(n) = self.nodes.get_mut(id - 1) {
                    n.verdict = if holds { Verdict::True } else { Verdict::False };
                }
                return Ok(Child::Leaf { holds, id });
            }
        }
        let id = self.create(clause.clone(), Rule::Unexpanded)?;
        Ok(Child::Open { id, clause, links })
    }

    /// Whether the cycle from the top of the stack back to `depth` may be
    /// unfolded forever.
    fn cycle_holds(&self, depth: usize, back_links: &[Vec<u32>]) -> bool {
        match self.opts.cycle_policy {
            CyclePolicy::EntryUntil => !self.stack[depth]
                .clause
                .iter()
                .all(|a| self.table.get(a.1).is_until_assertion()),
            CyclePolicy::Traces => self.has_good_trace(depth, back_links),
        }
    }

    /// Builds the graph of assertion occurrences along the cycle, linked to
    /// the occurrences they were derived from, and looks for a loop of
    /// occurrences that regenerates a gamma formula whose body is satisfied
    /// by staying in the loop (a box, never an until).
    fn has_good_trace(&self, depth: usize, back_links: &[Vec<u32>]) -> bool {
        let frames = &self.stack[depth..];
        let mut offset = Vec::with_capacity(frames.len());
        let mut n = 0;
        for f in frames {
            offset.push(n);
            n += f.clause.len();
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut link = |from_frame: usize, links: &[Vec<u32>], to_frame: usize| {
            for (i, parents) in links.iter().enumerate() {
                for &p in parents {
                    adj[offset[from_frame] + p as usize].push(offset[to_frame] + i);
                }
            }
        };
        for k in 1..frames.len() {
            link(k - 1, &frames[k].links, k);
        }
        link(frames.len() - 1, back_links, 0);

        let comp = tarjan(&adj);
        let mut size = vec![0usize; n];
        for &c in &comp {
            size[c] += 1;
        }
        frames.iter().enumerate().any(|(k, f)| {
            f.clause.iter().enumerate().any(|(i, a)| {
                let v = offset[k] + i;
                matches!(
                    self.table.kind(a.1),
                    Kind::Gamma {
                        limit_holds: true,
                        ..
                    }
                ) && (size[comp[v]] > 1 || adj[v].contains(&v))
            })
        })
    }

    fn check_clause_bound(&self) -> Result<(), CheckError> {
        let exp = self
            .table
            .formulas
            .len()
            .saturating_mul(self.table.states.len());
        if exp < 64 && self.distinct.len() as u128 > 1u128 << exp {
            return Err(CheckError::Invariant(format!(
                "{} distinct clauses exceed 2^{exp}",
                self.distinct.len()
            )));
        }
        Ok(())
    }

    fn render(&self, clause: &[Asn]) -> Vec<RenderedAssertion> {
        clause.iter().map(|&a| self.render_asn(a)).collect()
    }

    fn render_asn(&self, (s, f): Asn) -> RenderedAssertion {
        RenderedAssertion {
            state: self.table.state_name(s),
            formula: self.table.get(f).to_string(),
        }
    }

    fn graph(&self) -> ProofGraph {
        ProofGraph {
            root: 1,
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| ProofNode {
                    id: i + 1,
                    rule: n.rule,
                    principal: n.principal.map(|a| self.render_asn(a)),
                    clause: self.render(&n.clause),
                    children: n.children.clone(),
                    back_edges: n.back_edges.clone(),
                    verdict: n.verdict,
                })
                .collect(),
        }
    }
}
