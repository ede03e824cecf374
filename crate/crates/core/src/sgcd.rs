//! The SGCD loop: level-by-level axiom-driven lemma generation into a
//! policy-managed cache, with goal-driven lookahead before each level.

use std::fmt::Write as _;
use std::ops::ControlFlow;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::{Duration, Instant};

use log::{debug, info};
use thiserror::Error;

use crate::cache::{Cache, CacheEntry, CacheOrdering, CachePolicy};
use crate::dterm::DTerm;
use crate::enumerate::{Budget, GeneratorKind, Generator, Halt, Mode};
use crate::formula::{Formula, FormulaMeasure};
use crate::kernel;
use crate::mgt::{verify, AxiomBase};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Axiom-driven levels with goal-driven lookahead before each level.
    Blended,
    /// Lemma generation only; goals are checked against new lemmas.
    AxiomDrivenOnly,
    /// Iterative deepening without a cache.
    GoalDrivenOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopMode {
    FirstProof,
    /// Keep going until the level cap or timeout, collecting every proof
    /// found for each goal.
    EnumerateAlternates,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub generator: GeneratorKind,
    pub lookahead: usize,
    pub max_level: Option<usize>,
    pub timeout: Option<Duration>,
    pub mode: SearchMode,
    pub stop: StopMode,
    pub goals: Vec<Formula>,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl SearchConfig {
    pub fn new(generator: GeneratorKind, goals: Vec<Formula>) -> Self {
        SearchConfig {
            generator,
            lookahead: 1,
            max_level: None,
            timeout: None,
            mode: SearchMode::Blended,
            stop: StopMode::FirstProof,
            goals,
            cancel: None,
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::Config(m.to_string()));
        if self.lookahead == 0 {
            return bad("lookahead must be at least 1");
        }
        if self.mode != SearchMode::AxiomDrivenOnly && self.goals.is_empty() {
            return bad("goal-driven search needs at least one goal");
        }
        if let Some(g) = self.goals.iter().find(|g| !g.is_ground()) {
            return Err(SearchError::Config(format!("goal {g:?} is not ground")));
        }
        if self.stop == StopMode::EnumerateAlternates && self.max_level.is_none() && self.timeout.is_none() {
            return bad("enumerating alternates needs a level cap or a timeout");
        }
        if self.mode == SearchMode::AxiomDrivenOnly
            && self.goals.is_empty()
            && self.max_level.is_none()
            && self.timeout.is_none()
        {
            return bad("lemma generation without goals needs a level cap or a timeout");
        }
        Ok(())
    }
}

/// Named configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Tree size, lookahead 2, dimension factor 5, subsumption, capacity 1000.
    Sgcd1,
    /// As `Sgcd1` but leveled by height.
    SgcdHeight,
    /// As `SgcdHeight` with capacity 3000.
    Sgcd3000,
    /// PSP levels, lookahead 2, subsumption, capacity 3000.
    Psp,
    /// Pure goal-driven search by tree size.
    GoalTree,
    /// Pure goal-driven search by height.
    GoalHeight,
}

impl Preset {
    pub const ALL: [Preset; 6] =
        [Preset::Sgcd1, Preset::SgcdHeight, Preset::Sgcd3000, Preset::Psp, Preset::GoalTree, Preset::GoalHeight];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Sgcd1 => "sgcd-1",
            Preset::SgcdHeight => "sgcd-height",
            Preset::Sgcd3000 => "sgcd-3000",
            Preset::Psp => "psp",
            Preset::GoalTree => "goal-tree",
            Preset::GoalHeight => "goal-height",
        }
    }

    pub fn config(self, goals: Vec<Formula>) -> (SearchConfig, CachePolicy) {
        let pruning = |capacity| CachePolicy {
            subsumption_delete: true,
            capacity: Some(capacity),
            ordering: CacheOrdering::HeightSize,
            dim_limit_factor: Some(5.0),
            keep_residual: false,
        };
        let blended = |kind| SearchConfig { lookahead: 2, ..SearchConfig::new(kind, goals.clone()) };
        let goal_only =
            |kind| SearchConfig { mode: SearchMode::GoalDrivenOnly, ..SearchConfig::new(kind, goals.clone()) };
        match self {
            Preset::Sgcd1 => (blended(GeneratorKind::TreeSize), pruning(1000)),
            Preset::SgcdHeight => (blended(GeneratorKind::Height), pruning(1000)),
            Preset::Sgcd3000 => (blended(GeneratorKind::Height), pruning(3000)),
            Preset::Psp => (blended(GeneratorKind::Psp), pruning(3000)),
            Preset::GoalTree => (goal_only(GeneratorKind::TreeSize), CachePolicy::unrestricted()),
            Preset::GoalHeight => (goal_only(GeneratorKind::Height), CachePolicy::unrestricted()),
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                format!("unknown preset `{s}` (known: {})", names.join(", "))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    GoalDriven,
    AxiomDriven,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotProvedReason {
    Exhausted,
    Timeout,
    LevelCap,
    Cancelled,
}

impl std::fmt::Display for NotProvedReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NotProvedReason::Exhausted => "exhausted",
            NotProvedReason::Timeout => "timeout",
            NotProvedReason::LevelCap => "level-cap",
            NotProvedReason::Cancelled => "cancelled",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GoalStatus {
    Proved { proof: DTerm, level: usize, elapsed: Duration, phase: Phase },
    NotProved(NotProvedReason),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoalResult {
    pub goal: Formula,
    pub status: GoalStatus,
    /// Further proofs, in discovery order; only filled when enumerating
    /// alternates.
    pub alternates: Vec<DTerm>,
}

impl GoalResult {
    pub fn proof(&self) -> Option<&DTerm> {
        match &self.status {
            GoalStatus::Proved { proof, .. } => Some(proof),
            GoalStatus::NotProved(_) => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchStats {
    pub levels_completed: usize,
    /// Cache size after each completed level.
    pub cache_sizes: Vec<usize>,
    /// Axiom-driven solutions produced.
    pub generated: u64,
    pub deleted_subsumed: u64,
    pub deleted_dim_limit: u64,
    pub deleted_capacity: u64,
    pub residual: usize,
    pub unification_attempts: u64,
    pub recomputed_levels: u64,
    pub goal_driven_runs: u64,
    pub elapsed: Duration,
}

impl SearchStats {
    /// One `key<TAB>value` line per statistic. Timing is omitted so the
    /// block is reproducible; use [`SearchStats::elapsed`] for logs.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let sizes: Vec<String> = self.cache_sizes.iter().map(|s| s.to_string()).collect();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}\t{v}");
        };
        kv("levels_completed", self.levels_completed.to_string());
        kv("cache_sizes", sizes.join(","));
        kv("generated", self.generated.to_string());
        kv("deleted_subsumed", self.deleted_subsumed.to_string());
        kv("deleted_dim_limit", self.deleted_dim_limit.to_string());
        kv("deleted_capacity", self.deleted_capacity.to_string());
        kv("residual", self.residual.to_string());
        kv("unification_attempts", self.unification_attempts.to_string());
        kv("recomputed_levels", self.recomputed_levels.to_string());
        kv("goal_driven_runs", self.goal_driven_runs.to_string());
        out
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub goals: Vec<GoalResult>,
    pub stats: SearchStats,
    pub cache: Cache,
}

impl SearchOutcome {
    pub fn all_proved(&self) -> bool {
        self.goals.iter().all(|g| g.proof().is_some())
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("internal error: proof {proof} does not verify for goal {goal:?}")]
    Unsound { goal: Formula, proof: DTerm },
}

fn input_maxima(axioms: &AxiomBase, goals: &[Formula]) -> FormulaMeasure {
    goals.iter().map(Formula::measure).fold(axioms.max_measure(), |a, m| FormulaMeasure {
        size: a.size.max(m.size),
        height: a.height.max(m.height),
    })
}

struct Run<'a> {
    axioms: &'a AxiomBase,
    cfg: &'a SearchConfig,
    start: Instant,
    budget: Budget,
    results: Vec<GoalResult>,
    stats: SearchStats,
}

impl Run<'_> {
    fn open(&self) -> bool {
        self.results.iter().any(|r| r.proof().is_none())
    }

    fn wanted(&self, i: usize) -> bool {
        self.cfg.stop == StopMode::EnumerateAlternates || self.results[i].proof().is_none()
    }

    fn finished(&self) -> bool {
        self.cfg.stop == StopMode::FirstProof && !self.results.is_empty() && !self.open()
    }

    fn record(&mut self, i: usize, proof: &DTerm, level: usize, phase: Phase) -> Result<(), SearchError> {
        let goal = &self.results[i].goal;
        if !verify(proof, self.axioms, goal).passed() || !kernel::check(proof, self.axioms, goal) {
            return Err(SearchError::Unsound { goal: goal.clone(), proof: proof.clone() });
        }
        let r = &mut self.results[i];
        if r.proof().is_none() {
            info!("proved goal {i} at level {level} ({phase:?}): {proof}");
            r.status =
                GoalStatus::Proved { proof: proof.clone(), level, elapsed: self.start.elapsed(), phase };
        } else if self.cfg.stop == StopMode::EnumerateAlternates && r.proof() != Some(proof) {
            r.alternates.push(proof.clone());
        }
        Ok(())
    }

    fn close(&mut self, reason: NotProvedReason) {
        for r in &mut self.results {
            if r.proof().is_none() {
                r.status = GoalStatus::NotProved(reason);
            }
        }
    }

    /// Goal-driven search at `level` for each wanted goal. Returns the halt
    /// reason if the budget ran out.
    fn goal_driven(&mut self, cache: Option<&Cache>, level: usize) -> Result<Option<Halt>, SearchError> {
        for i in 0..self.results.len() {
            if !self.wanted(i) {
                continue;
            }
            self.stats.goal_driven_runs += 1;
            let mode = Mode::GoalDriven(self.results[i].goal.clone());
            let mut g = Generator::new(self.cfg.generator, self.axioms).with_budget(self.budget.clone());
            if let Some(c) = cache {
                g = g.with_cache(c);
            }
            let first_only = self.cfg.stop == StopMode::FirstProof;
            let mut found: Vec<DTerm> = Vec::new();
            let r = g.for_each(level, &mode, &mut |d, _| {
                found.push(d.clone());
                if first_only {
                    ControlFlow::Break(Halt::Stop)
                } else {
                    ControlFlow::Continue(())
                }
            });
            let s = g.stats();
            self.stats.unification_attempts += s.attempts;
            self.stats.recomputed_levels += s.recomputed_levels;
            for d in &found {
                self.record(i, d, level, Phase::GoalDriven)?;
            }
            match r {
                ControlFlow::Break(Halt::Stop) | ControlFlow::Continue(()) => {}
                ControlFlow::Break(h) => return Ok(Some(h)),
            }
        }
        Ok(None)
    }
}

fn halt_reason(h: Halt) -> NotProvedReason {
    match h {
        Halt::Cancelled => NotProvedReason::Cancelled,
        Halt::Timeout | Halt::Stop => NotProvedReason::Timeout,
    }
}

/// Would level `next` necessarily be empty given the cache so far?
fn exhausted(kind: GeneratorKind, cache: &Cache, next: usize) -> bool {
    match kind {
        GeneratorKind::TreeSize => match cache.max_nonempty_level() {
            None => true,
            Some(m) => next > 2 * m + 1,
        },
        GeneratorKind::Height | GeneratorKind::Psp => next > 0 && cache.level(next - 1).is_empty(),
    }
}

pub fn search(axioms: &AxiomBase, cfg: &SearchConfig, policy: &CachePolicy) -> Result<SearchOutcome, SearchError> {
    cfg.validate()?;
    policy.validate().map_err(SearchError::Config)?;
    if axioms.is_empty() {
        return Err(SearchError::Config("no axioms".into()));
    }
    let start = Instant::now();
    let mut budget = Budget::unlimited();
    if let Some(t) = cfg.timeout {
        budget = budget.with_deadline(start + t);
    }
    if let Some(c) = &cfg.cancel {
        budget = budget.with_cancel(c.clone());
    }
    let mut run = Run {
        axioms,
        cfg,
        start,
        budget,
        results: cfg
            .goals
            .iter()
            .map(|g| GoalResult {
                goal: g.clone(),
                status: GoalStatus::NotProved(NotProvedReason::Exhausted),
                alternates: Vec::new(),
            })
            .collect(),
        stats: SearchStats::default(),
    };
    let input_max = input_maxima(axioms, &cfg.goals);
    let mut cache = Cache::new();

    let reason = 'outer: {
        for level in 0.. {
            if cfg.max_level.is_some_and(|m| level > m) {
                break 'outer NotProvedReason::LevelCap;
            }
            if let ControlFlow::Break(h) = run.budget.poll() {
                break 'outer halt_reason(h);
            }
            match cfg.mode {
                SearchMode::GoalDrivenOnly => {
                    debug!("goal-driven level {level}");
                    if let Some(h) = run.goal_driven(None, level)? {
                        break 'outer halt_reason(h);
                    }
                    if run.finished() {
                        break 'outer NotProvedReason::Exhausted;
                    }
                    continue;
                }
                SearchMode::Blended => {
                    let top = match cfg.max_level {
                        Some(m) => (level + cfg.lookahead - 1).min(m),
                        None => level + cfg.lookahead - 1,
                    };
                    for l in level..=top {
                        debug!("goal-driven level {l} over cache frontier {level}");
                        if let Some(h) = run.goal_driven(Some(&cache), l)? {
                            break 'outer halt_reason(h);
                        }
                        if run.finished() {
                            break 'outer NotProvedReason::Exhausted;
                        }
                    }
                }
                SearchMode::AxiomDrivenOnly => {}
            }

            // Axiom-driven level.
            let mut g = Generator::new(cfg.generator, axioms).with_cache(&cache).with_budget(run.budget.clone());
            let (found, halt) = g.collect(level, &Mode::AxiomDriven);
            let s = g.stats();
            run.stats.unification_attempts += s.attempts;
            run.stats.recomputed_levels += s.recomputed_levels;
            if let Some(h) = halt {
                break 'outer halt_reason(h);
            }
            run.stats.generated += found.len() as u64;
            if cfg.mode == SearchMode::AxiomDrivenOnly {
                for i in 0..run.results.len() {
                    if !run.wanted(i) {
                        continue;
                    }
                    let goal = run.results[i].goal.clone();
                    let hits: Vec<DTerm> =
                        found.iter().filter(|(_, f)| f.subsumes(&goal)).map(|(d, _)| d.clone()).collect();
                    for d in hits {
                        run.record(i, &d, level, Phase::AxiomDriven)?;
                        if cfg.stop == StopMode::FirstProof {
                            break;
                        }
                    }
                }
            }
            if run.finished() {
                break 'outer NotProvedReason::Exhausted;
            }
            let entries = found.into_iter().map(|(d, f)| CacheEntry::new(f, d, level)).collect();
            let deleted = cache.update(level, entries, policy, input_max);
            run.stats.deleted_subsumed += deleted.subsumed.len() as u64;
            run.stats.deleted_dim_limit += deleted.dim_limited.len() as u64;
            run.stats.deleted_capacity += deleted.trimmed.len() as u64;
            run.stats.levels_completed += 1;
            run.stats.cache_sizes.push(cache.len());
            debug!("level {level} cached, cache size {}", cache.len());
            if exhausted(cfg.generator, &cache, level + 1) {
                // Goal-driven lookahead above the frontier could still run
                // in principle, but it only combines cached levels.
                break 'outer NotProvedReason::Exhausted;
            }
        }
        unreachable!("the level loop only exits through a break")
    };
    run.close(reason);
    run.stats.residual = cache.residual().len();
    run.stats.elapsed = start.elapsed();
    Ok(SearchOutcome { goals: run.results, stats: run.stats, cache })
}
