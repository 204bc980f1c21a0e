//! Clause-learning existence search for negative two-literal programs.
//!
//! Variable `a` is true iff atom `a` is in `S`. The answer-set conditions
//! become clauses:
//!
//! * `a <- not a`: the unit clause `a`;
//! * `a <- not b` with `a != b`: `a or b` (no two atoms of `T` linked);
//! * every atom `a` with supporters `b1..bm`: `not a or not b1 or ... or not bm`
//!   (an atom of `S` needs a supporter in `T`); with no supporter, `not a`.
//!
//! The search is conflict-driven with first-UIP learning, activity-based
//! branching, phase saving and Luby restarts.

use std::collections::BinaryHeap;

use crate::model::{Atom, AtomSet, Program};

type Lit = u32;

#[inline]
fn pos(v: usize) -> Lit {
    (v as u32) << 1
}

#[inline]
fn neg(v: usize) -> Lit {
    ((v as u32) << 1) | 1
}

#[inline]
fn var(l: Lit) -> usize {
    (l >> 1) as usize
}

#[inline]
fn not(l: Lit) -> Lit {
    l ^ 1
}

const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;

#[derive(PartialEq)]
struct Scored(f64, usize);

impl Eq for Scored {}

impl PartialOrd for Scored {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scored {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .total_cmp(&other.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

struct Cdcl {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<u32>>,
    /// Per-variable value: 0 false, 1 true, `UNDEF`.
    value: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    bump: f64,
    heap: BinaryHeap<Scored>,
    phase: Vec<bool>,
    seen: Vec<bool>,
    /// Variables marked in `seen` by [`Cdcl::redundant`], cleared after analysis.
    cleared: Vec<usize>,
}

enum Added {
    Ok,
    Conflict,
}

impl Cdcl {
    fn new(n: usize) -> Self {
        Cdcl {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            value: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![NO_REASON; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            bump: 1.0,
            heap: (0..n).map(|v| Scored(0.0, v)).collect(),
            phase: vec![true; n],
            seen: vec![false; n],
            cleared: Vec::new(),
        }
    }

    #[inline]
    fn lit_value(&self, l: Lit) -> u8 {
        match self.value[var(l)] {
            UNDEF => UNDEF,
            v => v ^ (l as u8 & 1),
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn assign(&mut self, l: Lit, reason: u32) {
        let v = var(l);
        self.value[v] = (l & 1 == 0) as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Adds an original clause at level 0.
    fn add_clause(&mut self, mut lits: Vec<Lit>) -> Added {
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0] == not(w[1])) {
            return Added::Ok;
        }
        match lits.len() {
            0 => Added::Conflict,
            1 => match self.lit_value(lits[0]) {
                0 => Added::Conflict,
                1 => Added::Ok,
                _ => {
                    self.assign(lits[0], NO_REASON);
                    Added::Ok
                }
            },
            _ => {
                self.attach(lits);
                Added::Ok
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>) -> u32 {
        let ci = self.clauses.len() as u32;
        self.watches[lits[0] as usize].push(ci);
        self.watches[lits[1] as usize].push(ci);
        self.clauses.push(lits);
        ci
    }

    /// Unit propagation; returns a conflicting clause index.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = not(p);
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                let value = &self.value;
                let val = |l: Lit| match value[var(l)] {
                    UNDEF => UNDEF,
                    v => v ^ (l as u8 & 1),
                };
                let clause = &mut self.clauses[ci as usize];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if val(first) == 1 {
                    i += 1;
                    continue;
                }
                if let Some(k) = (2..clause.len()).find(|&k| val(clause[k]) != 0) {
                    clause.swap(1, k);
                    let l = clause[1];
                    self.watches[l as usize].push(ci);
                    ws.swap_remove(i);
                    continue;
                }
                if val(first) == 0 {
                    conflict = Some(ci);
                    break;
                }
                self.assign(first, ci);
                i += 1;
            }
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.bump;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.bump *= 1e-100;
            self.heap = (0..self.value.len())
                .filter(|&u| self.value[u] == UNDEF)
                .map(|u| Scored(self.activity[u], u))
                .collect();
        }
        if self.value[v] == UNDEF {
            self.heap.push(Scored(self.activity[v], v));
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![0];
        let mut pending = 0;
        let mut idx = self.trail.len();
        let current = self.decision_level();
        let mut p: Option<Lit> = None;
        loop {
            let clause = self.clauses[confl as usize].clone();
            let start = usize::from(p.is_some());
            for &q in &clause[start..] {
                let v = var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[var(self.trail[idx])] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[var(lit)] = false;
            pending -= 1;
            if pending == 0 {
                learnt[0] = not(lit);
                break;
            }
            confl = self.reason[var(lit)];
            // The reason's implied literal sits at position 0.
            debug_assert_eq!(self.clauses[confl as usize][0], lit);
        }
        // Drop literals implied by the rest of the clause.
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &q)| i == 0 || self.reason[var(q)] == NO_REASON || !self.redundant(q))
            .collect();
        for &q in &learnt[1..] {
            self.seen[var(q)] = false;
        }
        for v in self.cleared.drain(..) {
            self.seen[v] = false;
        }
        let mut k = 0;
        learnt.retain(|_| {
            k += 1;
            keep[k - 1]
        });
        let mut back = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for i in 2..learnt.len() {
                if self.level[var(learnt[i])] > self.level[var(learnt[best])] {
                    best = i;
                }
            }
            learnt.swap(1, best);
            back = self.level[var(learnt[1])];
        }
        self.bump *= 1.0 / 0.95;
        (learnt, back)
    }

    /// True when every antecedent of `q` is already in the learnt clause
    /// (marked `seen`) or is itself redundant.
    fn redundant(&mut self, q: Lit) -> bool {
        let mut stack = vec![q];
        let top = self.cleared.len();
        while let Some(l) = stack.pop() {
            let r = self.reason[var(l)];
            let clause = &self.clauses[r as usize];
            for &x in &clause[1..] {
                let v = var(x);
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                if self.reason[v] == NO_REASON {
                    for u in self.cleared.drain(top..) {
                        self.seen[u] = false;
                    }
                    return false;
                }
                self.seen[v] = true;
                self.cleared.push(v);
                stack.push(x);
            }
        }
        true
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let stop = self.trail_lim[lvl as usize];
        for i in (stop..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = var(l);
            self.phase[v] = l & 1 == 0;
            self.value[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.heap.push(Scored(self.activity[v], v));
        }
        self.trail.truncate(stop);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = stop;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(Scored(act, v)) = self.heap.pop() {
            if self.value[v] == UNDEF && act == self.activity[v] {
                return Some(if self.phase[v] { pos(v) } else { neg(v) });
            }
        }
        (0..self.value.len())
            .find(|&v| self.value[v] == UNDEF)
            .map(|v| if self.phase[v] { pos(v) } else { neg(v) })
    }

    fn solve(&mut self) -> bool {
        if self.propagate().is_some() {
            return false;
        }
        let mut restart_index = 1u64;
        loop {
            let budget = 100 * luby(restart_index);
            restart_index += 1;
            let mut conflicts = 0u64;
            loop {
                if let Some(confl) = self.propagate() {
                    if self.decision_level() == 0 {
                        return false;
                    }
                    conflicts += 1;
                    let (learnt, back) = self.analyze(confl);
                    self.cancel_until(back);
                    let unit = learnt[0];
                    if learnt.len() == 1 {
                        self.assign(unit, NO_REASON);
                    } else {
                        let ci = self.attach(learnt);
                        self.assign(unit, ci);
                    }
                    continue;
                }
                if conflicts >= budget {
                    self.cancel_until(0);
                    break;
                }
                match self.pick_branch() {
                    None => return true,
                    Some(l) => {
                        self.trail_lim.push(self.trail.len());
                        self.assign(l, NO_REASON);
                    }
                }
            }
        }
    }
}

/// Luby sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(mut i: u64) -> u64 {
    loop {
        let mut k = 1;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if (1u64 << k) - 1 == i {
            return 1 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

/// Some answer set of a nonempty negative two-literal program, or `None`.
pub(crate) fn find_answer_set(p: &Program) -> Option<AtomSet> {
    let n = p.universe();
    let mut solver = Cdcl::new(n);
    let mut supporters: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut ok = true;
    for r in p.rules() {
        let (a, b) = (r.head().index(), r.neg_body()[0].index());
        let clause = if a == b {
            vec![pos(a)]
        } else {
            supporters[a].push(b);
            vec![pos(a), pos(b)]
        };
        if let Added::Conflict = solver.add_clause(clause) {
            ok = false;
        }
    }
    for (a, sup) in supporters.iter().enumerate() {
        let mut clause = vec![neg(a)];
        clause.extend(sup.iter().map(|&b| neg(b)));
        if let Added::Conflict = solver.add_clause(clause) {
            ok = false;
        }
    }
    if !ok || !solver.solve() {
        return None;
    }
    let set = AtomSet::from_atoms(n, (0..n).filter(|&v| solver.value[v] == 1).map(Atom::from))
        .expect("indices below n");
    Some(set)
}
