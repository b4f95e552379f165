#![allow(dead_code)]

use atlcheck::cgm::{ExplicitCgm, ModelProvider};
use atlcheck::engine::{check, CheckOptions, CheckResult};
use atlcheck::formula::parse;
use atlcheck::oracle::eval_state_formula;

pub fn model(text: &str) -> ExplicitCgm {
    ExplicitCgm::parse(text).expect("model loads")
}

pub fn run(m: &ExplicitCgm, state: &str, formula: &str, opts: &CheckOptions) -> CheckResult {
    let s = m.find_state(state).expect("state exists");
    let f = parse(formula).expect("formula parses");
    check(m, &s, &f, opts).expect("check succeeds")
}

pub fn oracle(m: &ExplicitCgm, state: &str, formula: &str) -> bool {
    let s = m.find_state(state).expect("state exists");
    let f = parse(formula).expect("formula parses");
    eval_state_formula(m, &s, &f).expect("oracle succeeds")
}

pub fn exhaustive() -> CheckOptions {
    CheckOptions {
        early_abort: false,
        retain_proof: true,
        ..CheckOptions::default()
    }
}
