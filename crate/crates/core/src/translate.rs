//! Rewriting negative normal programs into negative two-literal form.
//!
//! Each rule `R = a <- not c1, ..., not ct` gets a fresh atom `e_R` and
//! becomes `a <- not e_R`; the positive links `e_R <- c_i` are then unfolded
//! against every rule `R'` with head `c_i`, giving `e_R <- not e_R'`. Atoms
//! `c_i` that head no rule are never true, so their links are dropped.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{Atom, AtomSet, Program, Rule};
use crate::solver::scan_all_subsets;

/// Output of [`to_two_literal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationResult {
    /// Negative two-literal program over `n + aux.len()` atoms.
    pub output: Program,
    /// Auxiliary atoms, one per input rule, in input rule order.
    pub aux: Vec<Atom>,
    /// `origin[i]` is the input rule that `aux[i]` stands for.
    pub origin: Vec<Rule>,
}

impl TranslationResult {
    pub fn aux_set(&self) -> BTreeSet<Atom> {
        self.aux.iter().copied().collect()
    }
}

fn aux_names(p: &Program) -> Option<Vec<String>> {
    let base = p.symbols()?;
    let taken: BTreeSet<&str> = base.iter().map(String::as_str).collect();
    let mut prefix = String::from("e_");
    while taken.iter().any(|s| s.starts_with(&prefix)) {
        prefix.insert(0, '_');
    }
    let mut names = base.to_vec();
    names.extend((0..p.len()).map(|i| format!("{prefix}{i}")));
    Some(names)
}

/// Translates a negative normal program into an equivalent negative
/// two-literal program modulo the returned auxiliary atoms.
pub fn to_two_literal(p: &Program) -> Result<TranslationResult> {
    if let Some(r) = p.rules().iter().find(|r| !r.pos_body().is_empty()) {
        return Err(Error::UnsupportedInput(format!(
            "rule with head {} has a positive body; only negative programs are translated",
            p.atom_name(r.head())
        )));
    }
    let n = p.universe();
    let aux: Vec<Atom> = (0..p.len()).map(|i| Atom::from(n + i)).collect();

    let mut heads_of: Vec<Vec<Atom>> = vec![Vec::new(); n];
    for (r, &e) in p.rules().iter().zip(&aux) {
        heads_of[r.head().index()].push(e);
    }

    let mut rules = Vec::new();
    for (r, &e) in p.rules().iter().zip(&aux) {
        rules.push(Rule::negative(r.head(), e));
        for c in r.neg_body() {
            for &e_other in &heads_of[c.index()] {
                rules.push(Rule::negative(e, e_other));
            }
        }
    }
    let mut output = Program::new(n + aux.len(), rules)?;
    if let Some(names) = aux_names(p) {
        output = output.with_symbols(names)?;
    }
    Ok(TranslationResult {
        output,
        aux,
        origin: p.rules().to_vec(),
    })
}

/// Brute-force check that `p2` has the same answer sets as `p` once the
/// atoms in `aux` are deleted. `p2`'s universe must be `p`'s universe plus
/// the auxiliary atoms.
pub fn check_equivalence_modulo_aux(
    p: &Program,
    p2: &Program,
    aux: &BTreeSet<Atom>,
    cap: usize,
) -> Result<bool> {
    let n = p.universe();
    if p2.universe() != n + aux.len() || aux.iter().any(|a| a.index() < n || a.index() >= p2.universe()) {
        return Err(Error::InvalidArgument(format!(
            "second program must range over the {n} original atoms plus the {} auxiliary atoms",
            aux.len()
        )));
    }
    let original: BTreeSet<AtomSet> = scan_all_subsets(p, cap)?.into_iter().collect();
    let projected: BTreeSet<AtomSet> = scan_all_subsets(p2, cap)?
        .into_iter()
        .map(|s| s.truncate(n))
        .collect();
    Ok(original == projected)
}
