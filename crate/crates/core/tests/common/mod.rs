#![allow(dead_code)]

use klm_core::kb::{Assertion, KnowledgeBase};
use klm_core::universe::Universe;
use klm_core::Formula;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const VARS: [&str; 5] = ["p", "q", "r", "s", "t"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn universe(n: usize) -> Universe {
    Universe::unconstrained(&VARS[..n]).unwrap()
}

pub fn random_formula(rng: &mut ChaCha8Rng, vars: &[&str], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(*vars.choose(rng).unwrap()),
        };
    }
    let op = rng.gen_range(0..5);
    let mut sub = || random_formula(rng, vars, depth - 1);
    match op {
        0 => Formula::not(sub()),
        1 => Formula::and(sub(), sub()),
        2 => Formula::or(sub(), sub()),
        3 => Formula::implies(sub(), sub()),
        _ => Formula::iff(sub(), sub()),
    }
}

pub fn random_assertion(rng: &mut ChaCha8Rng, vars: &[&str]) -> Assertion {
    Assertion::new(random_formula(rng, vars, 2), random_formula(rng, vars, 2))
}

/// A knowledge base over the first `n` variables with at most `max` assertions.
pub fn random_kb(rng: &mut ChaCha8Rng, n: usize, max: usize) -> KnowledgeBase {
    let vars = &VARS[..n];
    let count = rng.gen_range(0..=max);
    let assertions = (0..count).map(|_| random_assertion(rng, vars)).collect();
    KnowledgeBase::new(universe(n), assertions).unwrap()
}

pub fn random_horn_assertion(rng: &mut ChaCha8Rng, vars: &[&str]) -> Assertion {
    let k = rng.gen_range(0..=vars.len().min(2));
    let mut picked: Vec<&str> = vars.to_vec();
    picked.shuffle(rng);
    let antecedent = Formula::conjunction(picked[..k].iter().map(|v| Formula::atom(*v)));
    let consequent = if rng.gen_bool(0.15) {
        Formula::False
    } else {
        Formula::atom(*vars.choose(rng).unwrap())
    };
    Assertion::new(antecedent, consequent)
}

pub fn random_horn_kb(rng: &mut ChaCha8Rng, n: usize, max: usize) -> KnowledgeBase {
    let vars = &VARS[..n];
    let count = rng.gen_range(1..=max);
    let assertions = (0..count).map(|_| random_horn_assertion(rng, vars)).collect();
    KnowledgeBase::new(universe(n), assertions).unwrap()
}
