//! Seeded sampling of random programs from the linear model `L(c1, c2)`.
//!
//! Over a universe of `n` atoms, each of the `n(n-1)` pure rules `a <- not b`
//! is present independently with probability `c1/n` and each of the `n`
//! contradiction rules `a <- not a` with probability `c2/n`.
//!
//! Reproducibility contract: every random stream is a ChaCha8 generator
//! seeded through [`ChaCha8Rng::seed_from_u64`]. Independent streams (trial
//! `i` of a batch, resample `j` after an empty draw) use the sub-seed
//! [`mix`]`(seed, i)`, so results never depend on execution order.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{invalid, Error, Result};
use crate::model::{Atom, Program, Rule};

/// A 64-bit seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

impl Seed {
    /// Sub-seed for stream `i` derived from this seed.
    pub fn substream(self, i: u64) -> Seed {
        Seed(mix(self.0, i))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// SplitMix64 finalizer applied to `seed + (i + 1) * 0x9E3779B97F4A7C15`.
pub fn mix(seed: u64, i: u64) -> u64 {
    let mut z = seed.wrapping_add(i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Parameters of the linear model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearModelParams {
    n: usize,
    c1: f64,
    c2: f64,
}

impl LinearModelParams {
    pub fn new(n: usize, c1: f64, c2: f64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite()) || c1 < 0.0 || c2 < 0.0 {
            return invalid(format!("c1 = {c1} and c2 = {c2} must be finite and non-negative"));
        }
        if c1 + c2 <= 0.0 {
            return invalid("c1 + c2 must be positive");
        }
        if (n as f64) <= c1.max(c2) {
            return invalid(format!("n = {n} must exceed max(c1, c2) = {}", c1.max(c2)));
        }
        Ok(LinearModelParams { n, c1, c2 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Pure-rule probability `c1 / n`.
    pub fn p(&self) -> f64 {
        self.c1 / self.n as f64
    }

    /// Contradiction-rule probability `c2 / n`.
    pub fn d(&self) -> f64 {
        self.c2 / self.n as f64
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p()
    }

    /// `(1 - d) / q`.
    pub fn r(&self) -> f64 {
        (1.0 - self.d()) / self.q()
    }
}

/// `E[|P|] = c1 (n - 1) + c2`.
pub fn expected_rule_count(params: &LinearModelParams) -> f64 {
    params.c1 * (params.n as f64 - 1.0) + params.c2
}

/// How pure rules are drawn. Both strategies sample the same distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// Binomial count of pure rules, then that many distinct pairs uniformly
    /// when the model is sparse; per-rule coin flips otherwise.
    #[default]
    Auto,
    /// One Bernoulli draw per candidate rule.
    Bernoulli,
    /// Binomial count plus uniform choice of distinct pairs.
    Sparse,
}

/// A generated program plus the number of empty draws that were rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub program: Program,
    pub resamples: u64,
}

/// Draws a nonempty program from `L(c1, c2)`, deterministic in `(params, seed)`.
pub fn generate(params: &LinearModelParams, seed: Seed) -> Result<Program> {
    generate_with(params, seed, Sampling::Auto).map(|g| g.program)
}

/// [`generate`] with an explicit sampling strategy and the resample count.
///
/// The first attempt uses `seed` directly; if the draw is empty, attempt `j`
/// (from 0) uses `seed.substream(j)`.
pub fn generate_with(params: &LinearModelParams, seed: Seed, sampling: Sampling) -> Result<Generated> {
    let params = LinearModelParams::new(params.n, params.c1, params.c2)?;
    let mut rng = seed.rng();
    let mut resamples = 0u64;
    loop {
        let rules = draw_rules(&params, &mut rng, sampling)?;
        if !rules.is_empty() {
            return Ok(Generated {
                program: Program::new(params.n, rules)?,
                resamples,
            });
        }
        rng = seed.substream(resamples).rng();
        resamples += 1;
    }
}

fn pair_from_index(n: usize, i: usize) -> (u32, u32) {
    let a = i / (n - 1);
    let j = i % (n - 1);
    let b = if j < a { j } else { j + 1 };
    (a as u32, b as u32)
}

fn draw_rules<R: Rng>(params: &LinearModelParams, rng: &mut R, sampling: Sampling) -> Result<Vec<Rule>> {
    let n = params.n;
    let pairs = n * (n - 1);
    let p = params.p();
    let sparse = match sampling {
        Sampling::Auto => p < 0.125,
        Sampling::Bernoulli => false,
        Sampling::Sparse => true,
    };
    let mut rules = Vec::new();
    if pairs > 0 && p > 0.0 {
        if sparse {
            let binom = Binomial::new(pairs as u64, p)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let m = binom.sample(rng) as usize;
            rules.reserve(m);
            for i in index::sample(rng, pairs, m) {
                let (a, b) = pair_from_index(n, i);
                rules.push(Rule::negative(Atom(a), Atom(b)));
            }
        } else {
            for i in 0..pairs {
                if rng.random_bool(p) {
                    let (a, b) = pair_from_index(n, i);
                    rules.push(Rule::negative(Atom(a), Atom(b)));
                }
            }
        }
    }
    let d = params.d();
    if d > 0.0 {
        for a in 0..n as u32 {
            if rng.random_bool(d) {
                rules.push(Rule::negative(Atom(a), Atom(a)));
            }
        }
    }
    Ok(rules)
}
