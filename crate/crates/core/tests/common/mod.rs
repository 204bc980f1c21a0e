#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use randlp::{Atom, Program, Rule};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Negative two-literal program where each of the `n^2` candidate rules
/// is present with probability `density`.
pub fn random_n2(rng: &mut impl Rng, n: usize, density: f64) -> Program {
    let mut rules = Vec::new();
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            if rng.random_bool(density) {
                rules.push(Rule::negative(Atom(a), Atom(b)));
            }
        }
    }
    Program::new(n, rules).unwrap()
}

/// Negative normal program with `rules` rules and up to `max_body`
/// distinct negative body atoms per rule (empty bodies are facts).
pub fn random_negative(rng: &mut impl Rng, n: usize, rules: usize, max_body: usize) -> Program {
    let out = (0..rules)
        .map(|_| {
            let head = Atom(rng.random_range(0..n as u32));
            let t = rng.random_range(0..=max_body.min(n));
            let body: Vec<Atom> = rand::seq::index::sample(rng, n, t)
                .into_iter()
                .map(|i| Atom(i as u32))
                .collect();
            Rule::new(head, vec![], body).unwrap()
        })
        .collect();
    Program::new(n, out).unwrap()
}
