//! Level-indexed proof structure generators.
//!
//! A generator yields every D-term of a given level whose MGT unifies with a
//! target: the goal (goal-driven) or a fresh variable (axiom-driven). Lower
//! levels come from a [`LevelCache`] when one covers them and are otherwise
//! re-enumerated. Solutions are pushed to a callback, which may stop the
//! enumeration by returning [`ControlFlow::Break`].

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use crate::cache::{CacheEntry, LevelCache, LevelTable};
use crate::dterm::{AxiomId, DTerm};
use crate::formula::Formula;
use crate::mgt::{mgt, AxiomBase};
use crate::store::{Store, TermRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// Level = number of inner nodes.
    TreeSize,
    /// Level = height.
    Height,
    /// Proof-subproof level: a node is built from a proof at the previous
    /// level and one of its own subproofs or an axiom.
    Psp,
}

impl std::str::FromStr for GeneratorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tree" | "treesize" | "tree-size" | "size" => Ok(GeneratorKind::TreeSize),
            "height" => Ok(GeneratorKind::Height),
            "psp" => Ok(GeneratorKind::Psp),
            _ => Err(format!("unknown generator `{s}` (expected tree, height or psp)")),
        }
    }
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GeneratorKind::TreeSize => "tree",
            GeneratorKind::Height => "height",
            GeneratorKind::Psp => "psp",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Target is the given ground goal.
    GoalDriven(Formula),
    /// Target is a fresh variable; every well-formed structure qualifies.
    AxiomDriven,
}

/// Why an enumeration stopped early.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Halt {
    /// The consumer asked to stop.
    Stop,
    Timeout,
    Cancelled,
}

/// Wall-clock deadline and cancellation flag, polled every few hundred
/// unification attempts.
#[derive(Clone, Debug, Default)]
pub struct Budget {
    deadline: Option<Instant>,
    cancel: Option<Arc<AtomicBool>>,
    ticks: u32,
}

impl Budget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn with_deadline(mut self, deadline: Instant) -> Self {
        self.deadline = Some(deadline);
        self
    }

    pub fn with_cancel(mut self, flag: Arc<AtomicBool>) -> Self {
        self.cancel = Some(flag);
        self
    }

    pub fn deadline(&self) -> Option<Instant> {
        self.deadline
    }

    /// Checks the clock and the flag right now.
    pub fn poll(&self) -> ControlFlow<Halt> {
        if self.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed)) {
            return ControlFlow::Break(Halt::Cancelled);
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return ControlFlow::Break(Halt::Timeout);
        }
        ControlFlow::Continue(())
    }

    fn tick(&mut self) -> ControlFlow<Halt> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(512) {
            self.poll()
        } else {
            ControlFlow::Continue(())
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GenStats {
    /// Pattern unifications tried against axioms, cache entries or
    /// memoized subproof MGTs.
    pub attempts: u64,
    /// Solutions handed to the consumer.
    pub solutions: u64,
    /// Sub-levels below the query level that had to be re-enumerated
    /// because no cache covered them.
    pub recomputed_levels: u64,
}

type Sink<'s, 'a> = dyn FnMut(&mut Generator<'a>, &DTerm) -> ControlFlow<Halt> + 's;

pub struct Generator<'a> {
    kind: GeneratorKind,
    axioms: &'a AxiomBase,
    leaves: Vec<(DTerm, Formula, usize)>,
    cache: Option<&'a dyn LevelCache>,
    store: Store,
    budget: Budget,
    stats: GenStats,
    query_level: usize,
    psp_levels: HashMap<DTerm, Option<usize>>,
    mgts: HashMap<DTerm, Option<(Formula, usize)>>,
}

impl<'a> Generator<'a> {
    pub fn new(kind: GeneratorKind, axioms: &'a AxiomBase) -> Self {
        let leaves = axioms
            .iter()
            .map(|(id, f)| (DTerm::Axiom(id), f.clone(), f.var_count()))
            .collect();
        Generator {
            kind,
            axioms,
            leaves,
            cache: None,
            store: Store::new(),
            budget: Budget::unlimited(),
            stats: GenStats::default(),
            query_level: 0,
            psp_levels: HashMap::new(),
            mgts: HashMap::new(),
        }
    }

    pub fn with_cache(mut self, cache: &'a dyn LevelCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn stats(&self) -> GenStats {
        self.stats
    }

    /// Calls `consumer` with each solution of `level` and its normalized
    /// conclusion under the target: the MGT for axiom-driven runs, the goal
    /// for goal-driven runs.
    pub fn for_each(
        &mut self,
        level: usize,
        mode: &Mode,
        consumer: &mut dyn FnMut(&DTerm, &Formula) -> ControlFlow<Halt>,
    ) -> ControlFlow<Halt> {
        self.budget.poll()?;
        self.query_level = level;
        let mark = self.store.mark();
        let target = match mode {
            Mode::GoalDriven(goal) => self.store.import(goal),
            Mode::AxiomDriven => self.store.fresh_var(),
        };
        let r = self.gen(level, target, &mut |g, d| {
            let f = g.store.extract(target);
            consumer(d, &f)
        });
        self.store.undo(mark);
        r
    }

    /// Collects all solutions of `level`. Returns the solutions found so far
    /// and the halt reason if the budget ran out.
    pub fn collect(&mut self, level: usize, mode: &Mode) -> (Vec<(DTerm, Formula)>, Option<Halt>) {
        let mut out = Vec::new();
        let r = self.for_each(level, mode, &mut |d, f| {
            out.push((d.clone(), f.clone()));
            ControlFlow::Continue(())
        });
        (out, r.break_value())
    }

    fn gen(&mut self, level: usize, target: TermRef, k: &mut Sink<'_, 'a>) -> ControlFlow<Halt> {
        if let Some(cache) = self.cache {
            if level < cache.frontier() {
                return self.emit_entries(cache.entries(level), target, k);
            }
        }
        if level < self.query_level {
            self.stats.recomputed_levels += 1;
        }
        if level == 0 {
            return self.emit_leaves(target, k);
        }
        match self.kind {
            GeneratorKind::TreeSize => {
                for i in (0..level).rev() {
                    self.node(i, level - 1 - i, target, k)?;
                }
                ControlFlow::Continue(())
            }
            GeneratorKind::Height => {
                let top = level - 1;
                for i in (0..level).rev() {
                    if i == top {
                        for j in 0..=top {
                            self.node(i, j, target, k)?;
                        }
                    } else {
                        self.node(i, top, target, k)?;
                    }
                }
                ControlFlow::Continue(())
            }
            GeneratorKind::Psp => self.psp(level, target, k),
        }
    }

    fn emit_leaves(&mut self, target: TermRef, k: &mut Sink<'_, 'a>) -> ControlFlow<Halt> {
        for i in 0..self.leaves.len() {
            self.budget.tick()?;
            self.stats.attempts += 1;
            let (d, f, n) = self.leaves[i].clone();
            let mark = self.store.mark();
            let r = if self.store.unify_pattern(&f, n, target) {
                self.stats.solutions += 1;
                k(self, &d)
            } else {
                ControlFlow::Continue(())
            };
            self.store.undo(mark);
            r?;
        }
        ControlFlow::Continue(())
    }

    fn emit_entries(
        &mut self,
        entries: &'a [CacheEntry],
        target: TermRef,
        k: &mut Sink<'_, 'a>,
    ) -> ControlFlow<Halt> {
        for e in entries {
            self.budget.tick()?;
            self.stats.attempts += 1;
            let mark = self.store.mark();
            let r = if self.store.unify_pattern(&e.lemma, e.nvars, target) {
                self.stats.solutions += 1;
                k(self, &e.proof)
            } else {
                ControlFlow::Continue(())
            };
            self.store.undo(mark);
            r?;
        }
        ControlFlow::Continue(())
    }

    /// Solutions `D(major, minor)` with the major premise from level `i`
    /// and the minor premise from level `j`.
    fn node(&mut self, i: usize, j: usize, target: TermRef, k: &mut Sink<'_, 'a>) -> ControlFlow<Halt> {
        let mark = self.store.mark();
        let x = self.store.fresh_var();
        let major_target = self.store.imp(x, target);
        let r = self.gen(i, major_target, &mut |g, major| {
            let major = major.clone();
            g.gen(j, x, &mut |g2, minor| k(g2, &DTerm::d(major.clone(), minor.clone())))
        });
        self.store.undo(mark);
        r
    }

    fn psp(&mut self, level: usize, target: TermRef, k: &mut Sink<'_, 'a>) -> ControlFlow<Halt> {
        let prev = level - 1;
        let mut seen: HashSet<DTerm> = HashSet::new();
        let mark = self.store.mark();
        let x = self.store.fresh_var();
        let major_target = self.store.imp(x, target);
        // The previous-level proof as major premise, the partner as minor.
        let mut r = self.gen(prev, major_target, &mut |g, major| {
            let major = major.clone();
            for partner in g.psp_partners(&major) {
                let cand = DTerm::d(major.clone(), partner.clone());
                g.psp_try(&cand, &partner, x, level, &mut seen, k)?;
            }
            ControlFlow::Continue(())
        });
        // The previous-level proof as minor premise.
        if r.is_continue() {
            r = self.gen(prev, x, &mut |g, minor| {
                let minor = minor.clone();
                for partner in g.psp_partners(&minor) {
                    let cand = DTerm::d(partner.clone(), minor.clone());
                    g.psp_try(&cand, &partner, major_target, level, &mut seen, k)?;
                }
                ControlFlow::Continue(())
            });
        }
        self.store.undo(mark);
        r
    }

    fn psp_try(
        &mut self,
        cand: &DTerm,
        partner: &DTerm,
        slot: TermRef,
        level: usize,
        seen: &mut HashSet<DTerm>,
        k: &mut Sink<'_, 'a>,
    ) -> ControlFlow<Halt> {
        if seen.contains(cand) || self.psp_level(cand) != Some(level) {
            return ControlFlow::Continue(());
        }
        let Some((lemma, nvars)) = self.mgt_of(partner) else {
            return ControlFlow::Continue(());
        };
        self.budget.tick()?;
        self.stats.attempts += 1;
        let mark = self.store.mark();
        let r = if self.store.unify_pattern(&lemma, nvars, slot) {
            seen.insert(cand.clone());
            self.stats.solutions += 1;
            k(self, cand)
        } else {
            ControlFlow::Continue(())
        };
        self.store.undo(mark);
        r
    }

    /// Axioms, then the compound subproofs of `d` in term order.
    fn psp_partners(&self, d: &DTerm) -> Vec<DTerm> {
        let mut out: Vec<DTerm> = self.axioms.ids().map(DTerm::Axiom).collect();
        out.extend(d.subterms().into_iter().filter(|s| !s.is_leaf()));
        out
    }

    fn mgt_of(&mut self, d: &DTerm) -> Option<(Formula, usize)> {
        if let Some(m) = self.mgts.get(d) {
            return m.clone();
        }
        let m = mgt(d, self.axioms).ok().map(|r| {
            let n = r.conclusion.var_count();
            (r.conclusion, n)
        });
        self.mgts.insert(d.clone(), m.clone());
        m
    }

    fn psp_level(&mut self, d: &DTerm) -> Option<usize> {
        psp_level_memo(d, self.axioms, &mut self.psp_levels)
    }
}

fn is_axiom_of(d: &DTerm, axioms: &AxiomBase) -> bool {
    matches!(d, DTerm::Axiom(id) if axioms.get(*id).is_some())
}

fn has_subterm(d: &DTerm, s: &DTerm) -> bool {
    let mut stack = vec![d];
    while let Some(t) = stack.pop() {
        if t == s {
            return true;
        }
        if let DTerm::D(a, b) = t {
            stack.push(a);
            stack.push(b);
        }
    }
    false
}

fn psp_level_memo(
    d: &DTerm,
    axioms: &AxiomBase,
    memo: &mut HashMap<DTerm, Option<usize>>,
) -> Option<usize> {
    match d {
        DTerm::Axiom(_) => return is_axiom_of(d, axioms).then_some(0),
        DTerm::N => return None,
        DTerm::D(..) => {}
    }
    if let Some(&l) = memo.get(d) {
        return l;
    }
    let (a, b) = d.children().expect("inner node");
    let la = psp_level_memo(a, axioms, memo);
    let lb = psp_level_memo(b, axioms, memo);
    let via_major = la.filter(|_| is_axiom_of(b, axioms) || has_subterm(a, b));
    let via_minor = lb.filter(|_| is_axiom_of(a, axioms) || has_subterm(b, a));
    let l = match (via_major, via_minor) {
        (Some(x), Some(y)) => Some(x.min(y) + 1),
        (Some(x), None) | (None, Some(x)) => Some(x + 1),
        (None, None) => None,
    };
    memo.insert(d.clone(), l);
    l
}

/// The PSP level of `d`: axioms are level 0, and `D(a, b)` is one above the
/// lowest child that contains the other child as a subproof or has an axiom
/// as its partner. `None` if `d` has no PSP level (it contains `n`, an
/// unknown axiom, or a node joining two unrelated compound proofs).
pub fn psp_level(d: &DTerm, axioms: &AxiomBase) -> Option<usize> {
    psp_level_memo(d, axioms, &mut HashMap::new())
}

/// Level of `d` under `kind`, or `None` when `d` has no PSP level.
pub fn level_of(kind: GeneratorKind, d: &DTerm, axioms: &AxiomBase) -> Option<usize> {
    match kind {
        GeneratorKind::TreeSize => Some(d.tree_size()),
        GeneratorKind::Height => Some(d.height()),
        GeneratorKind::Psp => psp_level(d, axioms),
    }
}

/// Every solution of `level`, re-enumerating all lower levels.
pub fn enumerate_level(
    kind: GeneratorKind,
    level: usize,
    mode: &Mode,
    axioms: &AxiomBase,
) -> Vec<(DTerm, Formula)> {
    Generator::new(kind, axioms).collect(level, mode).0
}

/// Unpruned table of all axiom-driven solutions of levels `0..=max_level`,
/// each level built from the previous ones.
pub fn level_table(kind: GeneratorKind, axioms: &AxiomBase, max_level: usize) -> LevelTable {
    let mut table = LevelTable::new();
    for level in 0..=max_level {
        let found = Generator::new(kind, axioms).with_cache(&table).collect(level, &Mode::AxiomDriven).0;
        table.push_level(found.into_iter().map(|(d, f)| CacheEntry::new(f, d, level)).collect());
    }
    table
}

/// All D-term structures of `level` over `ids`, without MGT filtering.
pub fn structures(kind: GeneratorKind, level: usize, ids: &[AxiomId]) -> Vec<DTerm> {
    let mut levels: Vec<Vec<DTerm>> = vec![ids.iter().map(|&id| DTerm::Axiom(id)).collect()];
    let mut base = AxiomBase::new(Default::default());
    for &id in ids {
        base.insert(id, Formula::var(0));
    }
    let mut memo = HashMap::new();
    for l in 1..=level {
        let mut next = Vec::new();
        match kind {
            GeneratorKind::TreeSize => {
                for i in (0..l).rev() {
                    for a in &levels[i] {
                        for b in &levels[l - 1 - i] {
                            next.push(DTerm::d(a.clone(), b.clone()));
                        }
                    }
                }
            }
            GeneratorKind::Height => {
                let top = l - 1;
                for i in (0..l).rev() {
                    let js: Vec<usize> = if i == top { (0..=top).collect() } else { vec![top] };
                    for j in js {
                        for a in &levels[i] {
                            for b in &levels[j] {
                                next.push(DTerm::d(a.clone(), b.clone()));
                            }
                        }
                    }
                }
            }
            GeneratorKind::Psp => {
                let mut seen = HashSet::new();
                for p in &levels[l - 1] {
                    let mut partners: Vec<DTerm> = ids.iter().map(|&id| DTerm::Axiom(id)).collect();
                    partners.extend(p.subterms().into_iter().filter(|s| !s.is_leaf()));
                    for q in &partners {
                        for cand in [DTerm::d(p.clone(), q.clone()), DTerm::d(q.clone(), p.clone())] {
                            if psp_level_memo(&cand, &base, &mut memo) == Some(l) && seen.insert(cand.clone()) {
                                next.push(cand);
                            }
                        }
                    }
                }
            }
        }
        levels.push(next);
    }
    levels.swap_remove(level)
}

/// Number of tree-size structures of `level` over `k` axioms:
/// Catalan(level) · k^(level+1).
pub fn count_raw(level: usize, k: usize) -> u128 {
    let mut catalan: u128 = 1;
    for i in 0..level as u128 {
        catalan = catalan * 2 * (2 * i + 1) / (i + 2);
    }
    catalan * (k as u128).pow(level as u32 + 1)
}
