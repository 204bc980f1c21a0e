//! Propositional normal logic programs and the reduct-based answer-set
//! semantics.
//!
//! Atoms are dense indices into a universe `0..n`. Everything here is the
//! general (trusted) semantics; [`crate::solver`] builds the fast path for
//! negative two-literal programs on top of it and is checked against it.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

use crate::error::{invalid, Result};

/// An atom, identified by its index in the owning program's universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(pub u32);

impl Atom {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for Atom {
    fn from(i: usize) -> Self {
        Atom(i as u32)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_{}", self.0)
    }
}

/// A subset of the atom universe `0..n`, stored as a bitset.
///
/// Sets order by their value as an `n`-bit unsigned integer (atom `i` is bit
/// `i`), which is the canonical enumeration order used by the solvers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AtomSet {
    n: usize,
    words: Vec<u64>,
}

impl AtomSet {
    pub fn empty(n: usize) -> Self {
        AtomSet {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n {
            s.insert(Atom::from(i));
        }
        s
    }

    pub fn from_atoms<I>(n: usize, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = Atom>,
    {
        let mut s = Self::empty(n);
        for a in atoms {
            if a.index() >= n {
                return invalid(format!("atom {a} outside universe of size {n}"));
            }
            s.insert(a);
        }
        Ok(s)
    }

    /// Builds the set whose bit pattern is `bits` (atom `i` present iff bit
    /// `i` is set). Only valid for `n <= 64`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        debug_assert!(n <= 64);
        let mut s = Self::empty(n);
        if n > 0 {
            let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            s.words[0] = bits & mask;
        }
        s
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, a: Atom) -> bool {
        let i = a.index();
        i < self.n && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, a: Atom) {
        let i = a.index();
        assert!(i < self.n, "atom {i} outside universe of size {}", self.n);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, a: Atom) {
        let i = a.index();
        if i < self.n {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// Complement with respect to the universe.
    pub fn complement(&self) -> AtomSet {
        let mut out = AtomSet::full(self.n);
        for (o, w) in out.words.iter_mut().zip(&self.words) {
            *o &= !w;
        }
        out
    }

    /// Atoms in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = Atom> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(Atom::from(wi * 64 + bit))
            })
        })
    }

    /// Restriction to the first `m` atoms (drops every atom with index `>= m`).
    pub fn truncate(&self, m: usize) -> AtomSet {
        let m = m.min(self.n);
        AtomSet::from_atoms(m, self.iter().filter(|a| a.index() < m))
            .expect("filtered atoms are in range")
    }
}

impl Ord for AtomSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for (a, b) in self.words.iter().rev().zip(other.words.iter().rev()) {
                match a.cmp(b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for AtomSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|a| a.0)).finish()
    }
}

/// `head <- pos_body, not neg_body`, with both bodies kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    head: Atom,
    pos_body: Vec<Atom>,
    neg_body: Vec<Atom>,
}

impl Rule {
    /// Builds a rule, rejecting bodies that mention an atom twice.
    pub fn new(head: Atom, mut pos_body: Vec<Atom>, mut neg_body: Vec<Atom>) -> Result<Self> {
        pos_body.sort_unstable();
        neg_body.sort_unstable();
        let mut all: Vec<Atom> = pos_body.iter().chain(&neg_body).copied().collect();
        all.sort_unstable();
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return invalid(format!("atom {} occurs twice in a rule body", w[0]));
        }
        Ok(Rule {
            head,
            pos_body,
            neg_body,
        })
    }

    /// `head <- not body`.
    pub fn negative(head: Atom, body: Atom) -> Self {
        Rule {
            head,
            pos_body: Vec::new(),
            neg_body: vec![body],
        }
    }

    /// `head <- body_1, ..., body_s`.
    pub fn positive(head: Atom, body: Vec<Atom>) -> Result<Self> {
        Rule::new(head, body, Vec::new())
    }

    pub fn head(&self) -> Atom {
        self.head
    }

    pub fn pos_body(&self) -> &[Atom] {
        &self.pos_body
    }

    pub fn neg_body(&self) -> &[Atom] {
        &self.neg_body
    }

    pub fn is_two_literal(&self) -> bool {
        self.pos_body.is_empty() && self.neg_body.len() == 1
    }

    pub fn is_pure(&self) -> bool {
        self.is_two_literal() && self.neg_body[0] != self.head
    }

    pub fn is_contradiction(&self) -> bool {
        self.is_two_literal() && self.neg_body[0] == self.head
    }

    fn max_atom(&self) -> Atom {
        self.pos_body
            .iter()
            .chain(&self.neg_body)
            .copied()
            .fold(self.head, Atom::max)
    }
}

/// A finite set of rules over the universe `0..n`.
///
/// Rules are kept sorted and deduplicated, so two programs with the same rule
/// set compare equal regardless of construction order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    n: usize,
    rules: Vec<Rule>,
    is_n2: bool,
    symbols: Option<Vec<String>>,
}

impl Program {
    pub fn new(n: usize, mut rules: Vec<Rule>) -> Result<Self> {
        if let Some(r) = rules.iter().find(|r| r.max_atom().index() >= n) {
            return invalid(format!(
                "rule with atom {} outside universe of size {n}",
                r.max_atom()
            ));
        }
        rules.sort_unstable();
        rules.dedup();
        let is_n2 = rules.iter().all(Rule::is_two_literal);
        Ok(Program {
            n,
            rules,
            is_n2,
            symbols: None,
        })
    }

    /// Attaches atom names. `symbols[i]` names atom `i`.
    pub fn with_symbols(mut self, symbols: Vec<String>) -> Result<Self> {
        if symbols.len() != self.n {
            return invalid(format!(
                "symbol table has {} names for a universe of {}",
                symbols.len(),
                self.n
            ));
        }
        self.symbols = Some(symbols);
        Ok(self)
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// True iff every rule has the form `a <- not b`.
    pub fn is_n2(&self) -> bool {
        self.is_n2
    }

    pub fn is_positive(&self) -> bool {
        self.rules.iter().all(|r| r.neg_body.is_empty())
    }

    pub fn symbols(&self) -> Option<&[String]> {
        self.symbols.as_deref()
    }

    /// Display name of an atom: its symbol when named, `_i` otherwise.
    pub fn atom_name(&self, a: Atom) -> String {
        match &self.symbols {
            Some(s) => s[a.index()].clone(),
            None => a.to_string(),
        }
    }

    pub fn contradiction_count(&self) -> usize {
        self.rules.iter().filter(|r| r.is_contradiction()).count()
    }
}

fn check_universe(p: &Program, s: &AtomSet) -> Result<()> {
    if p.universe() != s.universe() {
        return invalid(format!(
            "interpretation over {} atoms does not match program universe of {}",
            s.universe(),
            p.universe()
        ));
    }
    Ok(())
}

/// Classical satisfaction of a rule by an interpretation.
pub fn satisfies(rule: &Rule, s: &AtomSet) -> Result<bool> {
    if rule.max_atom().index() >= s.universe() {
        return invalid(format!(
            "rule mentions atom {} outside interpretation universe of {}",
            rule.max_atom(),
            s.universe()
        ));
    }
    Ok(s.contains(rule.head)
        || !rule.pos_body.iter().all(|&b| s.contains(b))
        || rule.neg_body.iter().any(|&c| s.contains(c)))
}

/// Gelfond-Lifschitz reduct: drops rules blocked by `s`, strips `not` from
/// the rest.
pub fn reduct(p: &Program, s: &AtomSet) -> Result<Program> {
    check_universe(p, s)?;
    let rules = p
        .rules
        .iter()
        .filter(|r| r.neg_body.iter().all(|&c| !s.contains(c)))
        .map(|r| Rule {
            head: r.head,
            pos_body: r.pos_body.clone(),
            neg_body: Vec::new(),
        })
        .collect();
    let mut out = Program::new(p.n, rules)?;
    out.symbols = p.symbols.clone();
    Ok(out)
}

/// Least model of a positive program via counter-based forward chaining.
pub fn least_model(p: &Program) -> Result<AtomSet> {
    if !p.is_positive() {
        return invalid("least model requested for a program with negative literals");
    }
    let mut watches: Vec<Vec<usize>> = vec![Vec::new(); p.n];
    let mut missing: Vec<usize> = Vec::with_capacity(p.rules.len());
    let mut model = AtomSet::empty(p.n);
    let mut queue = VecDeque::new();
    for (i, r) in p.rules.iter().enumerate() {
        missing.push(r.pos_body.len());
        for b in &r.pos_body {
            watches[b.index()].push(i);
        }
        if r.pos_body.is_empty() && !model.contains(r.head) {
            model.insert(r.head);
            queue.push_back(r.head);
        }
    }
    while let Some(a) = queue.pop_front() {
        for &ri in &watches[a.index()] {
            missing[ri] -= 1;
            let h = p.rules[ri].head;
            if missing[ri] == 0 && !model.contains(h) {
                model.insert(h);
                queue.push_back(h);
            }
        }
    }
    Ok(model)
}

/// `s` is an answer set of `p` iff it is the least model of `reduct(p, s)`.
pub fn is_answer_set_general(p: &Program, s: &AtomSet) -> Result<bool> {
    Ok(least_model(&reduct(p, s)?)? == *s)
}
