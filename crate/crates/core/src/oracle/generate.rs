//! Small models and formulas for differential testing.
//!
//! Exhaustive enumeration covers every model within tiny bounds; seeded
//! sampling (ChaCha8) reaches somewhat larger ones. The same seed always
//! gives the same stream.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cgm::{CgmBuilder, ExplicitCgm};
use crate::formula::{parse, Coalition, Formula, PathFormula, Quant};

const PROP_NAMES: [&str; 6] = ["p", "q", "r", "u", "v", "w"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("infeasible bounds: {0}")]
    Infeasible(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelBounds {
    pub max_states: usize,
    pub max_agents: u32,
    pub max_actions: usize,
    pub props: usize,
}

impl ModelBounds {
    fn check(&self) -> Result<(), GenerateError> {
        if self.max_states == 0 || self.max_agents == 0 || self.max_actions == 0 {
            return Err(GenerateError::Infeasible(
                "states, agents and actions must all be at least 1".into(),
            ));
        }
        if self.props > PROP_NAMES.len() {
            return Err(GenerateError::Infeasible(format!(
                "at most {} propositions",
                PROP_NAMES.len()
            )));
        }
        Ok(())
    }
}

pub fn prop_names(n: usize) -> Vec<String> {
    PROP_NAMES[..n].iter().map(|s| s.to_string()).collect()
}

fn state_name(i: usize) -> String {
    format!("s{i}")
}

fn action_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("a{i}")).collect()
}

// One state's actions per agent and a target for every global move, agent 1
// most significant.
#[derive(Clone)]
struct StateShape {
    counts: Vec<usize>,
    targets: Vec<usize>,
}

fn assemble(k: u32, shapes: &[StateShape], labels: &[Vec<String>]) -> ExplicitCgm {
    let mut b = CgmBuilder::new(k);
    for (i, l) in labels.iter().enumerate() {
        b.state(&state_name(i), l.clone()).expect("fresh state");
    }
    for (s, shape) in shapes.iter().enumerate() {
        let name = state_name(s);
        for (a, &c) in shape.counts.iter().enumerate() {
            b.actions(&name, a as u32 + 1, action_names(c));
        }
        for (ix, &t) in shape.targets.iter().enumerate() {
            let mut rem = ix;
            let mut mv = vec![String::new(); shape.counts.len()];
            for (a, &c) in shape.counts.iter().enumerate().rev() {
                mv[a] = format!("a{}", rem % c);
                rem /= c;
            }
            b.transition(&name, mv, &state_name(t));
        }
    }
    b.build().expect("generated model is well formed")
}

/// Every sequence over `0..base` of the given length, in lexicographic order.
fn sequences(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..base).map(move |x| {
                    let mut v = v.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// Every model within the bounds. Action sets are `a0..a{n-1}` and
/// propositions are the first `props` of `p, q, r, ...`.
pub fn exhaustive_models(bounds: ModelBounds) -> Result<Vec<ExplicitCgm>, GenerateError> {
    bounds.check()?;
    let props = prop_names(bounds.props);
    let label_sets: Vec<Vec<String>> = (0..1usize << props.len())
        .map(|mask| {
            props
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for n in 1..=bounds.max_states {
        for k in 1..=bounds.max_agents {
            let mut per_state = Vec::new();
            for counts in sequences(bounds.max_actions, k as usize) {
                let counts: Vec<usize> = counts.into_iter().map(|c| c + 1).collect();
                let moves = counts.iter().product();
                for targets in sequences(n, moves) {
                    per_state.push(StateShape {
                        counts: counts.clone(),
                        targets,
                    });
                }
            }
            for choice in sequences(per_state.len(), n) {
                let shapes: Vec<StateShape> =
                    choice.iter().map(|&i| per_state[i].clone()).collect();
                for labels in sequences(label_sets.len(), n) {
                    let labels: Vec<Vec<String>> =
                        labels.iter().map(|&l| label_sets[l].clone()).collect();
                    out.push(assemble(k, &shapes, &labels));
                }
            }
        }
    }
    Ok(out)
}

/// A model with between one and the maximum number of states, agents and
/// actions, chosen uniformly.
pub fn random_model(
    rng: &mut ChaCha8Rng,
    bounds: ModelBounds,
) -> Result<ExplicitCgm, GenerateError> {
    bounds.check()?;
    let props = prop_names(bounds.props);
    let n = rng.gen_range(1..=bounds.max_states);
    let k = rng.gen_range(1..=bounds.max_agents);
    let shapes: Vec<StateShape> = (0..n)
        .map(|_| {
            let counts: Vec<usize> = (0..k)
                .map(|_| rng.gen_range(1..=bounds.max_actions))
                .collect();
            let moves: usize = counts.iter().product();
            let targets = (0..moves).map(|_| rng.gen_range(0..n)).collect();
            StateShape { counts, targets }
        })
        .collect();
    let labels: Vec<Vec<String>> = (0..n)
        .map(|_| {
            props
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect()
        })
        .collect();
    Ok(assemble(k, &shapes, &labels))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaBounds {
    pub agents: u32,
    pub props: usize,
    pub max_size: usize,
}

impl FormulaBounds {
    fn check(&self) -> Result<(), GenerateError> {
        if self.props == 0 || self.props > PROP_NAMES.len() {
            return Err(GenerateError::Infeasible("need 1 to 6 propositions".into()));
        }
        if self.max_size == 0 {
            return Err(GenerateError::Infeasible(
                "formula size must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn coalitions(&self) -> Vec<Coalition> {
        (0..1u32 << self.agents)
            .map(|mask| Coalition::new((1..=self.agents).filter(|a| mask >> (a - 1) & 1 == 1)))
            .collect()
    }
}

fn literals(props: &[String]) -> Vec<Formula> {
    props
        .iter()
        .flat_map(|p| [Formula::prop(p), Formula::neg_prop(p)])
        .collect()
}

/// Formulas of the form `Q<A> B` where `B` is a temporal operator over
/// literals (depth 1) or a conjunction or disjunction of two of them
/// (depth 2), for every quantifier and coalition. Untils may also have `T`
/// on the left.
pub fn enumerate_formulas(
    bounds: &FormulaBounds,
    depth: usize,
) -> Result<Vec<Formula>, GenerateError> {
    bounds.check()?;
    if !(1..=2).contains(&depth) {
        return Err(GenerateError::Infeasible("depth must be 1 or 2".into()));
    }
    let lits = literals(&prop_names(bounds.props));
    let mut atoms = Vec::new();
    for l in &lits {
        atoms.push(PathFormula::Next(l.clone()));
        atoms.push(PathFormula::Always(l.clone()));
        atoms.push(PathFormula::eventually(l.clone()));
    }
    for a in &lits {
        for b in &lits {
            atoms.push(PathFormula::Until(a.clone(), b.clone()));
        }
    }
    let mut bodies = atoms.clone();
    if depth == 2 {
        for a in &atoms {
            for b in &atoms {
                bodies.push(PathFormula::and(a.clone(), b.clone()));
                bodies.push(PathFormula::or(a.clone(), b.clone()));
            }
        }
    }
    let mut out = Vec::new();
    for c in bounds.coalitions() {
        for q in [Quant::Exist, Quant::Univ] {
            for body in &bodies {
                let f = Formula::quantified(q, c.clone(), body.clone());
                if f.size() <= bounds.max_size {
                    out.push(f);
                }
            }
        }
    }
    Ok(out)
}

/// Hand-picked shapes: every production of the grammar, nested quantifiers,
/// and boolean combinations of different temporal operators under one
/// quantifier. `A` and `B` stand for coalitions, filled in per agent count.
const SHAPES: &[&str] = &[
    "T",
    "~T",
    "p",
    "~p",
    "p & ~q",
    "p | q",
    "<<A>> X p",
    "[[A]] X ~p",
    "<<A>> G p",
    "[[A]] G q",
    "<<A>> p U q",
    "[[A]] ~p U q",
    "<<A>> F q",
    "[[A]] F ~p",
    "<<A>> ((p U q) & G r)",
    "<<A>> ((p U q) & G p)",
    "[[A]] ((p U q) & G p)",
    "<<A>> (F p & F q)",
    "[[A]] (F p & F q)",
    "<<A>> (F p & G q)",
    "[[A]] (G p & F q)",
    "<<A>> (G p | G q)",
    "[[A]] (G p | G q)",
    "<<A>> (F p | G q)",
    "<<A>> (X p & G q)",
    "[[A]] (X p | F q)",
    "<<A>> (X p | X q)",
    "<<A>> (p U q | G ~q)",
    "[[A]] (p U q & q U p)",
    "<<A>> (G p & X ~p)",
    "<<A>> (p | X q)",
    "<<A>> (F p | p U q)",
    "<<A>> G ~p | <<A>> F p",
    "<<A>> G p | <<A>> F ~p",
    "p & <<A>> X ~p",
    "<<A>> X <<B>> G p",
    "<<A>> F [[B]] G p",
    "[[A]] G <<B>> F p",
    "<<A>> (<<B>> F p) U q",
    "<<A>> G (p | <<B>> X q)",
    "<<A>> (p & q)",
    "[[A]] (p | ~q)",
    "<<A>> ~(p U q)",
    "[[A]] (p R q)",
];

/// The hand-picked shapes instantiated for every coalition pair, keeping
/// those within the size bound.
pub fn shape_corpus(bounds: &FormulaBounds) -> Result<Vec<Formula>, GenerateError> {
    bounds.check()?;
    let coalitions = bounds.coalitions();
    let props = prop_names(bounds.props);
    let mut out: Vec<Formula> = Vec::new();
    for shape in SHAPES {
        let uses_b = shape.contains("<<B>>") || shape.contains("[[B]]");
        for a in &coalitions {
            let bs: &[Coalition] = if uses_b {
                &coalitions
            } else {
                std::slice::from_ref(a)
            };
            for b in bs {
                let text = shape
                    .replace("<<A>>", &format!("<<{a}>>"))
                    .replace("[[A]]", &format!("[[{a}]]"))
                    .replace("<<B>>", &format!("<<{b}>>"))
                    .replace("[[B]]", &format!("[[{b}]]"));
                let f = parse(&text).expect("shape parses");
                if f.size() <= bounds.max_size && props_within(&f, &props) && !out.contains(&f) {
                    out.push(f);
                }
            }
        }
    }
    Ok(out)
}

fn props_within(f: &Formula, props: &[String]) -> bool {
    fn path(p: &PathFormula, props: &[String]) -> bool {
        match p {
            PathFormula::State(f) | PathFormula::Next(f) | PathFormula::Always(f) => {
                props_within(f, props)
            }
            PathFormula::And(a, b) | PathFormula::Or(a, b) => path(a, props) && path(b, props),
            PathFormula::Until(a, b) => props_within(a, props) && props_within(b, props),
        }
    }
    match f {
        Formula::True | Formula::False => true,
        Formula::Prop(p) | Formula::NegProp(p) => props.contains(p),
        Formula::And(a, b) | Formula::Or(a, b) => props_within(a, props) && props_within(b, props),
        Formula::Exist(_, b) | Formula::Univ(_, b) => path(b, props),
    }
}

/// A random state formula of at most `bounds.max_size` nodes, normalised by
/// printing and reparsing.
pub fn random_formula(
    rng: &mut ChaCha8Rng,
    bounds: &FormulaBounds,
) -> Result<Formula, GenerateError> {
    bounds.check()?;
    let g = Gen {
        props: prop_names(bounds.props),
        coalitions: bounds.coalitions(),
    };
    let budget = rng.gen_range(1..=bounds.max_size);
    let f = g.state(rng, budget);
    Ok(parse(&f.to_string()).expect("printed formulas reparse"))
}

/// `count` distinct random formulas, or fewer if the space runs dry.
pub fn sample_formulas(
    seed: u64,
    bounds: &FormulaBounds,
    count: usize,
) -> Result<Vec<Formula>, GenerateError> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Formula> = Vec::new();
    let mut misses = 0;
    while out.len() < count && misses < 50 * count + 1000 {
        let f = random_formula(&mut rng, bounds)?;
        if out.contains(&f) {
            misses += 1;
        } else {
            out.push(f);
        }
    }
    Ok(out)
}

struct Gen {
    props: Vec<String>,
    coalitions: Vec<Coalition>,
}

impl Gen {
    fn literal(&self, rng: &mut ChaCha8Rng) -> Formula {
        match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            2..=5 => Formula::prop(self.props.choose(rng).expect("props")),
            _ => Formula::neg_prop(self.props.choose(rng).expect("props")),
        }
    }

    // Splits `budget` (at least 2) into two positive parts.
    fn split(rng: &mut ChaCha8Rng, budget: usize) -> (usize, usize) {
        let left = rng.gen_range(1..budget);
        (left, budget - left)
    }

    fn state(&self, rng: &mut ChaCha8Rng, budget: usize) -> Formula {
        if budget <= 1 {
            return self.literal(rng);
        }
        match rng.gen_range(0..10) {
            0 | 1 if budget >= 3 => {
                let (l, r) = Self::split(rng, budget - 1);
                let (a, b) = (self.state(rng, l), self.state(rng, r));
                if rng.gen_bool(0.5) {
                    Formula::and(a, b)
                } else {
                    Formula::or(a, b)
                }
            }
            _ => {
                let q = if rng.gen_bool(0.5) {
                    Quant::Exist
                } else {
                    Quant::Univ
                };
                let c = self.coalitions.choose(rng).expect("coalitions").clone();
                Formula::quantified(q, c, self.path(rng, budget - 1))
            }
        }
    }

    fn path(&self, rng: &mut ChaCha8Rng, budget: usize) -> PathFormula {
        if budget <= 1 {
            return PathFormula::State(self.literal(rng));
        }
        match rng.gen_range(0..9) {
            0 => PathFormula::Next(self.state(rng, budget - 1)),
            1 | 2 => PathFormula::Always(self.state(rng, budget - 1)),
            3 | 4 if budget >= 3 => {
                let (l, r) = Self::split(rng, budget - 1);
                PathFormula::Until(self.state(rng, l), self.state(rng, r))
            }
            5..=7 if budget >= 5 => {
                let (l, r) = Self::split(rng, budget - 1);
                let (a, b) = (self.path(rng, l), self.path(rng, r));
                if rng.gen_bool(0.5) {
                    PathFormula::and(a, b)
                } else {
                    PathFormula::or(a, b)
                }
            }
            _ if budget >= 3 => PathFormula::eventually(self.state(rng, budget - 2)),
            _ => PathFormula::Next(self.state(rng, budget - 1)),
        }
    }
}

/// Grammar productions a formula uses, for coverage checks.
pub fn productions(f: &Formula) -> Vec<&'static str> {
    let mut out = Vec::new();
    collect_state(f, false, &mut out);
    out.sort_unstable();
    out.dedup();
    out
}

fn collect_state(f: &Formula, inside: bool, out: &mut Vec<&'static str>) {
    match f {
        Formula::True => out.push("true"),
        Formula::False => out.push("false"),
        Formula::Prop(_) => out.push("prop"),
        Formula::NegProp(_) => out.push("neg-prop"),
        Formula::And(a, b) | Formula::Or(a, b) => {
            out.push(if matches!(f, Formula::And(..)) {
                "and"
            } else {
                "or"
            });
            collect_state(a, inside, out);
            collect_state(b, inside, out);
        }
        Formula::Exist(_, b) | Formula::Univ(_, b) => {
            out.push(if matches!(f, Formula::Exist(..)) {
                "exist"
            } else {
                "univ"
            });
            if inside {
                out.push("nested-quantifier");
            }
            collect_path(b, out);
        }
    }
}

fn collect_path(p: &PathFormula, out: &mut Vec<&'static str>) {
    match p {
        PathFormula::State(f) => {
            out.push("path-state");
            collect_state(f, true, out);
        }
        PathFormula::Next(f) => {
            out.push("next");
            collect_state(f, true, out);
        }
        PathFormula::Always(f) => {
            out.push("always");
            collect_state(f, true, out);
        }
        PathFormula::Until(a, b) => {
            out.push("until");
            collect_state(a, true, out);
            collect_state(b, true, out);
        }
        PathFormula::And(a, b) | PathFormula::Or(a, b) => {
            out.push(if matches!(p, PathFormula::And(..)) {
                "path-and"
            } else {
                "path-or"
            });
            if matches!(
                (a.as_ref(), b.as_ref()),
                (PathFormula::Until(..), PathFormula::Always(_))
                    | (PathFormula::Always(_), PathFormula::Until(..))
            ) {
                out.push("until-with-always");
            }
            collect_path(a, out);
            collect_path(b, out);
        }
    }
}
