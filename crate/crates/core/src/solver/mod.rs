//! Exact answer-set search for negative two-literal programs.
//!
//! For a program made only of rules `a <- not b`, a set `S` with complement
//! `T` is an answer set iff
//!
//! 1. no rule `b1 <- not b2` has both `b1, b2` in `T` (this covers `a <- not a`
//!    with `a` in `T`), and
//! 2. every `a` in `S` has a rule `a <- not b` with `b` in `T`.
//!
//! Read `a <- not b` as an arc `a -> b`: `T` is then a kernel of the rule
//! digraph. [`enumerate_answer_sets`] backtracks over IN/OUT assignments
//! with unit propagation on both conditions; [`find_answer_set`] answers the
//! existence question with clause learning; [`enumerate_brute_force`] scans
//! every subset with the reduct-based checker and serves as the oracle.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use crate::error::{invalid, Error, Result};
use crate::model::{Atom, AtomSet, Program};

mod learning;

/// Default largest universe [`enumerate_brute_force`] will scan.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 20;

/// Answer sets of one program plus summary counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerSetCollection {
    /// Answer sets in ascending bitset order.
    pub sets: Vec<AtomSet>,
    /// Answer-set size -> number of answer sets of that size.
    pub size_histogram: BTreeMap<usize, u64>,
    /// Set when a `limit` stopped the search early.
    pub truncated: bool,
}

impl AnswerSetCollection {
    fn from_sets(mut sets: Vec<AtomSet>, truncated: bool) -> Self {
        sets.sort();
        let mut size_histogram = BTreeMap::new();
        for s in &sets {
            *size_histogram.entry(s.len()).or_insert(0) += 1;
        }
        AnswerSetCollection {
            sets,
            size_histogram,
            truncated,
        }
    }

    pub fn count(&self) -> usize {
        self.sets.len()
    }
}

fn require_n2(p: &Program) -> Result<()> {
    if !p.is_n2() {
        return invalid("program is not negative two-literal");
    }
    Ok(())
}

fn require_nonempty(p: &Program) -> Result<()> {
    if p.is_empty() {
        return invalid("program has no rules");
    }
    Ok(())
}

/// Structural answer-set test for negative two-literal programs.
pub fn is_answer_set_n2(p: &Program, s: &AtomSet) -> Result<bool> {
    require_n2(p)?;
    if s.universe() != p.universe() {
        return invalid(format!(
            "interpretation over {} atoms does not match program universe of {}",
            s.universe(),
            p.universe()
        ));
    }
    let mut supported = AtomSet::empty(p.universe());
    for r in p.rules() {
        let (a, b) = (r.head(), r.neg_body()[0]);
        match (s.contains(a), s.contains(b)) {
            (false, false) => return Ok(false),
            (true, false) => supported.insert(a),
            _ => {}
        }
    }
    Ok(*s == supported)
}

/// Reusable reduct-based checker: precomputes watch lists once per program so
/// that scanning many interpretations stays cheap.
pub(crate) struct GeneralChecker<'p> {
    p: &'p Program,
    watches: Vec<Vec<usize>>,
}

impl<'p> GeneralChecker<'p> {
    pub(crate) fn new(p: &'p Program) -> Self {
        let mut watches = vec![Vec::new(); p.universe()];
        for (i, r) in p.rules().iter().enumerate() {
            for b in r.pos_body() {
                watches[b.index()].push(i);
            }
        }
        GeneralChecker { p, watches }
    }

    /// Same answer as [`crate::model::is_answer_set_general`] without
    /// materialising the reduct.
    pub(crate) fn is_answer_set(&self, s: &AtomSet) -> bool {
        let rules = self.p.rules();
        let mut missing: Vec<usize> = Vec::with_capacity(rules.len());
        let mut model = AtomSet::empty(self.p.universe());
        let mut queue = Vec::new();
        for r in rules {
            let live = r.neg_body().iter().all(|&c| !s.contains(c));
            missing.push(if live { r.pos_body().len() } else { usize::MAX });
            if live && r.pos_body().is_empty() && !model.contains(r.head()) {
                if !s.contains(r.head()) {
                    return false;
                }
                model.insert(r.head());
                queue.push(r.head());
            }
        }
        while let Some(a) = queue.pop() {
            for &ri in &self.watches[a.index()] {
                if missing[ri] == usize::MAX {
                    continue;
                }
                missing[ri] -= 1;
                let h = rules[ri].head();
                if missing[ri] == 0 && !model.contains(h) {
                    if !s.contains(h) {
                        return false;
                    }
                    model.insert(h);
                    queue.push(h);
                }
            }
        }
        model == *s
    }
}

/// All answer sets of any normal program by scanning every subset, with no
/// emptiness requirement.
pub(crate) fn scan_all_subsets(p: &Program, cap: usize) -> Result<Vec<AtomSet>> {
    let n = p.universe();
    if n > cap || n >= 64 {
        return Err(Error::CapExceeded { n, cap });
    }
    let checker = GeneralChecker::new(p);
    Ok((0u64..1 << n)
        .map(|bits| AtomSet::from_bits(n, bits))
        .filter(|s| checker.is_answer_set(s))
        .collect())
}

/// Exhaustive oracle over all `2^n` interpretations using the reduct-based
/// semantics. Refuses universes larger than [`DEFAULT_BRUTE_FORCE_CAP`].
pub fn enumerate_brute_force(p: &Program) -> Result<AnswerSetCollection> {
    enumerate_brute_force_with_cap(p, DEFAULT_BRUTE_FORCE_CAP)
}

pub fn enumerate_brute_force_with_cap(p: &Program, cap: usize) -> Result<AnswerSetCollection> {
    require_nonempty(p)?;
    Ok(AnswerSetCollection::from_sets(scan_all_subsets(p, cap)?, false))
}

/// Answer sets of a nonempty negative two-literal program, optionally
/// stopping after `limit` of them.
pub fn enumerate_answer_sets(p: &Program, limit: Option<usize>) -> Result<AnswerSetCollection> {
    let mut solver = KernelSolver::new(p)?;
    let mut sets = Vec::new();
    let mut truncated = false;
    if limit != Some(0) {
        solver.for_each(|s| {
            sets.push(s.clone());
            if limit.is_some_and(|l| sets.len() >= l) {
                truncated = true;
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
    } else {
        truncated = true;
    }
    Ok(AnswerSetCollection::from_sets(sets, truncated))
}

/// Number of answer sets, without storing them.
pub fn count_answer_sets(p: &Program) -> Result<u64> {
    let mut count = 0u64;
    KernelSolver::new(p)?.for_each(|_| {
        count += 1;
        ControlFlow::Continue(())
    });
    Ok(count)
}

/// Some answer set, found by clause-learning search, or `None` when the
/// program is inconsistent.
pub fn find_answer_set(p: &Program) -> Result<Option<AtomSet>> {
    require_n2(p)?;
    require_nonempty(p)?;
    let found = learning::find_answer_set(p);
    if let Some(s) = &found {
        if !is_answer_set_n2(p, s)? {
            return Err(Error::InvalidArgument(
                "existence search returned a set that is not an answer set".into(),
            ));
        }
    }
    Ok(found)
}

/// Whether the program has at least one answer set.
pub fn has_answer_set(p: &Program) -> Result<bool> {
    find_answer_set(p).map(|s| s.is_some())
}

/// Existence check through the backtracking enumerator, stopping at the
/// first answer set.
pub fn has_answer_set_backtracking(p: &Program) -> Result<bool> {
    let mut found = false;
    KernelSolver::new(p)?.for_each(|_| {
        found = true;
        ControlFlow::Break(())
    });
    Ok(found)
}

/// Per-size answer-set counts (index = size, length `n + 1`) and whether
/// `limit` cut the search short.
pub fn size_histogram(p: &Program, limit: Option<u64>) -> Result<(Vec<u64>, bool)> {
    let mut hist = vec![0u64; p.universe() + 1];
    let mut seen = 0u64;
    let mut truncated = false;
    KernelSolver::new(p)?.for_each(|s| {
        hist[s.len()] += 1;
        seen += 1;
        if limit.is_some_and(|l| seen >= l) {
            truncated = true;
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok((hist, truncated))
}

const UNASSIGNED: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;

/// Single-use backtracking search over one program.
///
/// `supporters[a]` lists every `b != a` with a rule `a <- not b`;
/// `dependents[b]` lists every `a != b` with such a rule. For each atom,
/// `open` counts unassigned supporters and `out_support` counts supporters
/// already placed in `T`.
pub struct KernelSolver<'p> {
    program: &'p Program,
    supporters: Vec<Vec<u32>>,
    dependents: Vec<Vec<u32>>,
    self_loop: Vec<bool>,
    order: Vec<u32>,
    value: Vec<u8>,
    open: Vec<u32>,
    out_support: Vec<u32>,
    trail: Vec<u32>,
    queue: Vec<u32>,
    queue_head: usize,
}

impl<'p> KernelSolver<'p> {
    pub fn new(program: &'p Program) -> Result<Self> {
        require_n2(program)?;
        require_nonempty(program)?;
        let n = program.universe();
        let mut supporters = vec![Vec::new(); n];
        let mut dependents = vec![Vec::new(); n];
        let mut self_loop = vec![false; n];
        for r in program.rules() {
            let (a, b) = (r.head().0, r.neg_body()[0].0);
            if a == b {
                self_loop[a as usize] = true;
            } else {
                supporters[a as usize].push(b);
                dependents[b as usize].push(a);
            }
        }
        let mut order: Vec<u32> = (0..n as u32).collect();
        let degree = |a: u32| {
            supporters[a as usize].len() + dependents[a as usize].len() + self_loop[a as usize] as usize
        };
        order.sort_by_key(|&a| (std::cmp::Reverse(degree(a)), a));
        let open = supporters.iter().map(|s| s.len() as u32).collect();
        Ok(KernelSolver {
            program,
            supporters,
            dependents,
            self_loop,
            order,
            value: vec![UNASSIGNED; n],
            open,
            out_support: vec![0; n],
            trail: Vec::with_capacity(n),
            queue: Vec::with_capacity(n),
            queue_head: 0,
        })
    }

    /// Calls `visit` with every answer set until it breaks. Consumes the
    /// solver's search state; a second call visits nothing.
    pub fn for_each<F>(&mut self, mut visit: F)
    where
        F: FnMut(&AtomSet) -> ControlFlow<()>,
    {
        if self.seed_root() {
            let _ = self.search(&mut visit);
        }
        self.order.clear();
    }

    /// Root-level forced assignments: atoms with a self-loop must be in `S`;
    /// atoms with no possible supporter must be in `T`.
    fn seed_root(&mut self) -> bool {
        if self.order.is_empty() {
            return false;
        }
        for a in 0..self.value.len() {
            let forced = match (self.self_loop[a], self.supporters[a].is_empty()) {
                (true, true) => return false,
                (true, false) => IN,
                (false, true) => OUT,
                (false, false) => continue,
            };
            if !self.enqueue(a as u32, forced) {
                return false;
            }
        }
        true
    }

    fn search<F>(&mut self, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&AtomSet) -> ControlFlow<()>,
    {
        if !self.propagate() {
            return ControlFlow::Continue(());
        }
        let Some(v) = self.pick() else {
            let s = self.current_set();
            debug_assert!(is_answer_set_n2(self.program, &s).unwrap_or(false));
            if is_answer_set_n2(self.program, &s).unwrap_or(false) {
                return visit(&s);
            }
            return ControlFlow::Continue(());
        };
        for val in [OUT, IN] {
            let mark = self.trail.len();
            if self.enqueue(v, val) {
                self.search(visit)?;
            }
            self.backtrack(mark);
        }
        ControlFlow::Continue(())
    }

    /// Next branching atom. An atom already in `S` that still lacks a
    /// supporter in `T` and has the fewest candidates left is the most
    /// constrained; branch on its highest-degree open supporter. Without such
    /// an atom, take the highest-degree unassigned atom.
    fn pick(&self) -> Option<u32> {
        let mut best: Option<(u32, u32)> = None;
        for &a in &self.order {
            let ai = a as usize;
            if self.value[ai] == IN && self.out_support[ai] == 0 && best.is_none_or(|(_, o)| self.open[ai] < o) {
                best = Some((a, self.open[ai]));
            }
        }
        if let Some((a, _)) = best {
            let rank = |b: u32| self.supporters[b as usize].len() + self.dependents[b as usize].len();
            return self.supporters[a as usize]
                .iter()
                .copied()
                .filter(|&b| self.value[b as usize] == UNASSIGNED)
                .max_by_key(|&b| (rank(b), std::cmp::Reverse(b)));
        }
        self.order
            .iter()
            .copied()
            .find(|&a| self.value[a as usize] == UNASSIGNED)
    }

    fn current_set(&self) -> AtomSet {
        let n = self.value.len();
        AtomSet::from_atoms(
            n,
            (0..n).filter(|&a| self.value[a] == IN).map(Atom::from),
        )
        .expect("indices below n")
    }

    /// Assigns `v` (or checks an existing assignment). Returns false on a
    /// clash with an earlier value.
    fn enqueue(&mut self, v: u32, val: u8) -> bool {
        let cur = self.value[v as usize];
        if cur != UNASSIGNED {
            return cur == val;
        }
        self.value[v as usize] = val;
        self.trail.push(v);
        for &a in &self.dependents[v as usize] {
            self.open[a as usize] -= 1;
            if val == OUT {
                self.out_support[a as usize] += 1;
            }
        }
        self.queue.push(v);
        true
    }

    fn backtrack(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            let was_out = self.value[v as usize] == OUT;
            for &a in &self.dependents[v as usize] {
                self.open[a as usize] += 1;
                if was_out {
                    self.out_support[a as usize] -= 1;
                }
            }
            self.value[v as usize] = UNASSIGNED;
        }
        self.queue.clear();
        self.queue_head = 0;
    }

    /// Support check for an atom in `S`: fails when no supporter can still
    /// land in `T`, forces the last candidate otherwise.
    fn check_in(&mut self, a: u32) -> bool {
        let ai = a as usize;
        if self.out_support[ai] > 0 {
            return true;
        }
        match self.open[ai] {
            0 => false,
            1 => {
                let b = self.supporters[ai]
                    .iter()
                    .copied()
                    .find(|&b| self.value[b as usize] == UNASSIGNED)
                    .expect("open counter tracks an unassigned supporter");
                self.enqueue(b, OUT)
            }
            _ => true,
        }
    }

    fn propagate(&mut self) -> bool {
        let ok = self.propagate_inner();
        self.queue.clear();
        self.queue_head = 0;
        ok
    }

    fn propagate_inner(&mut self) -> bool {
        while self.queue_head < self.queue.len() {
            let v = self.queue[self.queue_head];
            self.queue_head += 1;
            let vi = v as usize;
            if self.value[vi] == OUT {
                if self.self_loop[vi] {
                    return false;
                }
                // T is independent: every neighbour of v goes to S.
                for i in 0..self.dependents[vi].len() {
                    let a = self.dependents[vi][i];
                    if !self.enqueue(a, IN) {
                        return false;
                    }
                }
                for i in 0..self.supporters[vi].len() {
                    let b = self.supporters[vi][i];
                    if !self.enqueue(b, IN) {
                        return false;
                    }
                }
            } else {
                if !self.check_in(v) {
                    return false;
                }
                for i in 0..self.dependents[vi].len() {
                    let a = self.dependents[vi][i];
                    let ai = a as usize;
                    match self.value[ai] {
                        IN => {
                            if !self.check_in(a) {
                                return false;
                            }
                        }
                        UNASSIGNED if self.open[ai] == 0 && self.out_support[ai] == 0 => {
                            // a can no longer be supported, so it must be in T.
                            if !self.enqueue(a, OUT) {
                                return false;
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{is_answer_set_general, Rule};

    fn prog(n: usize, rules: &[(u32, u32)]) -> Program {
        Program::new(
            n,
            rules
                .iter()
                .map(|&(a, b)| Rule::negative(Atom(a), Atom(b)))
                .collect(),
        )
        .unwrap()
    }

    fn set(n: usize, atoms: &[u32]) -> AtomSet {
        AtomSet::from_atoms(n, atoms.iter().map(|&a| Atom(a))).unwrap()
    }

    #[test]
    fn n2_check_single_rule() {
        let p = prog(2, &[(0, 1)]);
        assert!(is_answer_set_n2(&p, &set(2, &[0])).unwrap());
        assert!(!is_answer_set_n2(&p, &set(2, &[1])).unwrap());
        assert!(!is_answer_set_n2(&p, &set(2, &[])).unwrap());
        assert!(!is_answer_set_n2(&p, &set(2, &[0, 1])).unwrap());
    }

    #[test]
    fn n2_check_contradiction() {
        let p = prog(1, &[(0, 0)]);
        assert!(!is_answer_set_n2(&p, &set(1, &[])).unwrap());
        assert!(!is_answer_set_n2(&p, &set(1, &[0])).unwrap());
        assert_eq!(count_answer_sets(&p).unwrap(), 0);
    }

    #[test]
    fn n2_check_rejects_general_programs() {
        let p = Program::new(2, vec![Rule::positive(Atom(0), vec![Atom(1)]).unwrap()]).unwrap();
        assert!(is_answer_set_n2(&p, &set(2, &[])).is_err());
        assert!(enumerate_answer_sets(&p, None).is_err());
        let empty = Program::new(2, vec![]).unwrap();
        assert!(enumerate_answer_sets(&empty, None).is_err());
        assert!(enumerate_brute_force(&empty).is_err());
    }

    #[test]
    fn two_cycle() {
        let p = prog(2, &[(0, 1), (1, 0)]);
        let c = enumerate_answer_sets(&p, None).unwrap();
        assert_eq!(c.sets, vec![set(2, &[0]), set(2, &[1])]);
        assert_eq!(c.size_histogram.get(&1), Some(&2));
        assert_eq!(count_answer_sets(&p).unwrap(), 2);
        assert!(has_answer_set(&p).unwrap());
    }

    #[test]
    fn single_rule_enumeration() {
        let p = prog(2, &[(0, 1)]);
        assert_eq!(enumerate_answer_sets(&p, None).unwrap().sets, vec![set(2, &[0])]);
    }

    #[test]
    fn brute_force_hand_checked() {
        // a <- not b, b <- not a, c <- not a
        let p = prog(3, &[(0, 1), (1, 0), (2, 0)]);
        let c = enumerate_brute_force(&p).unwrap();
        assert_eq!(c.sets, vec![set(3, &[0]), set(3, &[1, 2])]);
        assert_eq!(enumerate_answer_sets(&p, None).unwrap(), c);
    }

    #[test]
    fn brute_force_cap() {
        let p = prog(21, &[(0, 1)]);
        assert_eq!(
            enumerate_brute_force(&p),
            Err(Error::CapExceeded { n: 21, cap: 20 })
        );
    }

    #[test]
    fn limit_truncates() {
        let p = prog(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]);
        let all = enumerate_answer_sets(&p, None).unwrap();
        assert_eq!(all.count(), 4);
        assert!(!all.truncated);
        let some = enumerate_answer_sets(&p, Some(3)).unwrap();
        assert_eq!(some.count(), 3);
        assert!(some.truncated);
        let (hist, truncated) = size_histogram(&p, None).unwrap();
        assert_eq!(hist, vec![0, 0, 4, 0, 0]);
        assert!(!truncated);
    }

    #[test]
    fn isolated_atom_goes_to_t() {
        // atom 2 heads no rule and cannot be supported.
        let p = prog(3, &[(0, 1), (1, 0)]);
        let c = enumerate_answer_sets(&p, None).unwrap();
        assert_eq!(c.sets, vec![set(3, &[0]), set(3, &[1])]);
        // with a contradiction rule on the isolated atom nothing survives.
        let p = prog(3, &[(0, 1), (1, 0), (2, 2)]);
        assert_eq!(count_answer_sets(&p).unwrap(), 0);
    }

    #[test]
    fn fast_general_checker_matches_reference() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = 7;
            let mut rules = Vec::new();
            for _ in 0..10 {
                let head = Atom(rng.random_range(0..n));
                let body: Vec<u32> = (0..n).filter(|_| rng.random_bool(0.25)).collect();
                let (pos_b, neg_b): (Vec<u32>, Vec<u32>) =
                    body.into_iter().partition(|_| rng.random_bool(0.5));
                rules.push(
                    Rule::new(
                        head,
                        pos_b.into_iter().map(Atom).collect(),
                        neg_b.into_iter().map(Atom).collect(),
                    )
                    .unwrap(),
                );
            }
            let p = Program::new(n as usize, rules).unwrap();
            let checker = GeneralChecker::new(&p);
            for bits in 0..1u64 << n {
                let s = AtomSet::from_bits(n as usize, bits);
                assert_eq!(checker.is_answer_set(&s), is_answer_set_general(&p, &s).unwrap());
            }
        }
    }
}
