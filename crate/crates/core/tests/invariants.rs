use atlcheck::cgm::ModelProvider;
use atlcheck::cnf::{and_cnf, dnf_to_cnf, or_cnf, Cnf};
use atlcheck::engine::{check, CheckError, CheckOptions};
use atlcheck::formula::{parse, Formula};
use atlcheck::oracle::eval_state_formula;
use atlcheck::oracle::generate::{random_formula, random_model, FormulaBounds, ModelBounds};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ATOMS: u8 = 5;

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn eval_cnf(cnf: &Cnf<u8>, v: u32) -> bool {
    cnf.iter().all(|c| c.iter().any(|&a| v >> a & 1 == 1))
}

fn eval_dnf(terms: &[Vec<u8>], v: u32) -> bool {
    terms.iter().any(|t| t.iter().all(|&a| v >> a & 1 == 1))
}

fn terms() -> impl Strategy<Value = Vec<Vec<u8>>> {
    prop::collection::vec(prop::collection::vec(0..ATOMS, 0..4), 0..5)
}

fn cnf() -> impl Strategy<Value = Cnf<u8>> {
    prop::collection::vec(prop::collection::vec(0..ATOMS, 0..4), 0..4)
}

proptest! {
    #![proptest_config(config(512))]

    #[test]
    fn dnf_to_cnf_is_faithful(t in terms(), subsumption in any::<bool>()) {
        let c = dnf_to_cnf(&t, subsumption);
        for v in 0..1u32 << ATOMS {
            prop_assert_eq!(eval_cnf(&c, v), eval_dnf(&t, v));
        }
        for clause in &c {
            let mut sorted = clause.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), clause.len(), "repeated atom in {:?}", clause);
        }
    }

    #[test]
    fn or_and_and_of_clause_sets(a in cnf(), b in cnf(), subsumption in any::<bool>()) {
        let or = or_cnf(&a, &b, subsumption);
        let and = and_cnf(&a, &b);
        for v in 0..1u32 << ATOMS {
            prop_assert_eq!(eval_cnf(&or, v), eval_cnf(&a, v) || eval_cnf(&b, v));
            prop_assert_eq!(eval_cnf(&and, v), eval_cnf(&a, v) && eval_cnf(&b, v));
        }
    }

    #[test]
    fn display_reparses_to_the_same_formula(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bounds = FormulaBounds { agents: 3, props: 3, max_size: 16 };
        let f = random_formula(&mut rng, &bounds).unwrap();
        prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
    }
}

fn instance(seed: u64) -> (atlcheck::cgm::ExplicitCgm, usize, Formula) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds = ModelBounds {
        max_states: 3,
        max_agents: 2,
        max_actions: 2,
        props: 2,
    };
    let m = random_model(&mut rng, bounds).unwrap();
    let fb = FormulaBounds {
        agents: m.agent_count(),
        props: 2,
        max_size: 9,
    };
    let f = random_formula(&mut rng, &fb).unwrap();
    let s = m.states().last().unwrap();
    (m, s, f)
}

proptest! {
    #![proptest_config(config(256))]

    /// Closure membership, path uniqueness and the clause bound are checked
    /// inside the search; the verdict must match the oracle.
    #[test]
    fn search_invariants_hold(seed in any::<u64>()) {
        let (m, s, f) = instance(seed);
        let opts = CheckOptions { verify_invariants: true, ..CheckOptions::default() };
        let r = check(&m, &s, &f, &opts);
        prop_assert!(!matches!(r, Err(CheckError::Invariant(_))), "{:?} on {} at {}", r, f, s);
        let r = r.unwrap();
        prop_assert_eq!(r.verdict, eval_state_formula(&m, &s, &f).unwrap(), "{} at {}", f, s);
    }

    #[test]
    fn runs_are_deterministic(seed in any::<u64>()) {
        let (m, s, f) = instance(seed);
        let opts = CheckOptions { retain_proof: true, ..CheckOptions::default() };
        let a = check(&m, &s, &f, &opts).unwrap();
        let b = check(&m, &s, &f, &opts).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert_eq!(&a.stats, &b.stats);
        prop_assert_eq!(&a.witness, &b.witness);
        let (ga, gb) = (a.proof.unwrap(), b.proof.unwrap());
        prop_assert_eq!(ga.to_json(), gb.to_json());
        prop_assert_eq!(ga.to_dot(), gb.to_dot());
    }

    #[test]
    fn early_abort_never_costs_more(seed in any::<u64>()) {
        let (m, s, f) = instance(seed);
        let early = check(&m, &s, &f, &CheckOptions::default()).unwrap();
        let full = match check(&m, &s, &f, &CheckOptions { early_abort: false, ..CheckOptions::default() }) {
            Ok(full) => full,
            // the early run stayed inside the same budget
            Err(CheckError::BudgetExceeded { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert_eq!(early.verdict, full.verdict);
        if !early.verdict {
            prop_assert!(early.stats.nodes <= full.stats.nodes, "{} > {}", early.stats.nodes, full.stats.nodes);
            prop_assert!(early.witness.is_some());
        }
    }

    /// Every cyclic strongly connected component is entered by a back edge
    /// at its first-created vertex.
    #[test]
    fn components_are_entered_by_back_edges(seed in any::<u64>()) {
        let (m, s, f) = instance(seed);
        let opts = CheckOptions { early_abort: false, retain_proof: true, ..CheckOptions::default() };
        let g = match check(&m, &s, &f, &opts) {
            Ok(r) => r.proof.unwrap(),
            Err(CheckError::BudgetExceeded { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(g.unentered_components().is_empty(), "{:?}", g.unentered_components());
    }
}
