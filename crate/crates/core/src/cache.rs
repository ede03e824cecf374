//! Level-indexed lemma caches.
//!
//! A [`CacheEntry`] pairs a lemma (an MGT) with its proof and the generator
//! level the proof was found at. [`LevelTable`] keeps every solution;
//! [`Cache`] applies a [`CachePolicy`] after each level and may move
//! evicted entries to a residual store.

use std::cmp::Ordering;
use std::collections::HashSet;

use crate::dterm::DTerm;
use crate::formula::{Formula, FormulaMeasure};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    /// Normalized MGT of `proof`.
    pub lemma: Formula,
    pub proof: DTerm,
    pub level: usize,
    pub measure: FormulaMeasure,
    pub(crate) nvars: usize,
    pub(crate) seq: u64,
}

impl CacheEntry {
    pub fn new(lemma: Formula, proof: DTerm, level: usize) -> Self {
        let lemma = lemma.normalized();
        CacheEntry {
            measure: lemma.measure(),
            nvars: lemma.var_count(),
            lemma,
            proof,
            level,
            seq: 0,
        }
    }

    /// Insertion sequence number; smaller is older.
    pub fn age(&self) -> u64 {
        self.seq
    }
}

/// Read access to solved levels for sub-level lookups. Levels below
/// `frontier()` are served from the cache instead of being re-enumerated.
pub trait LevelCache {
    fn frontier(&self) -> usize;
    fn entries(&self, level: usize) -> &[CacheEntry];
}

/// Every solution of every completed level, unpruned.
#[derive(Clone, Debug, Default)]
pub struct LevelTable {
    levels: Vec<Vec<CacheEntry>>,
}

impl LevelTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_level(&mut self, entries: Vec<CacheEntry>) {
        self.levels.push(entries);
    }

    pub fn levels(&self) -> &[Vec<CacheEntry>] {
        &self.levels
    }
}

impl LevelCache for LevelTable {
    fn frontier(&self) -> usize {
        self.levels.len()
    }

    fn entries(&self, level: usize) -> &[CacheEntry] {
        self.levels.get(level).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Key for capacity trimming; entries that sort first are kept.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CacheOrdering {
    /// Lemma height, then lemma size, ascending.
    #[default]
    HeightSize,
    /// Lemma size, then lemma height, ascending.
    SizeHeight,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CachePolicy {
    pub subsumption_delete: bool,
    pub capacity: Option<usize>,
    pub ordering: CacheOrdering,
    /// Entries whose lemma size or height exceeds this factor times the
    /// input maximum are dropped on arrival.
    pub dim_limit_factor: Option<f64>,
    pub keep_residual: bool,
}

impl Default for CachePolicy {
    fn default() -> Self {
        Self::unrestricted()
    }
}

impl CachePolicy {
    /// No pruning at all.
    pub fn unrestricted() -> Self {
        CachePolicy {
            subsumption_delete: false,
            capacity: None,
            ordering: CacheOrdering::HeightSize,
            dim_limit_factor: None,
            keep_residual: false,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.capacity == Some(0) {
            return Err("cache capacity must be at least 1".into());
        }
        if let Some(f) = self.dim_limit_factor {
            if f.is_nan() || f <= 0.0 {
                return Err(format!("dimension limit factor must be positive, got {f}"));
            }
        }
        Ok(())
    }

    pub fn exceeds_dim_limit(&self, m: FormulaMeasure, input_max: FormulaMeasure) -> bool {
        match self.dim_limit_factor {
            None => false,
            Some(f) => {
                m.size as f64 > f * input_max.size as f64
                    || m.height as f64 > f * input_max.height as f64
            }
        }
    }

    fn compare(&self, a: &CacheEntry, b: &CacheEntry) -> Ordering {
        let key = |e: &CacheEntry| match self.ordering {
            CacheOrdering::HeightSize => (e.measure.height, e.measure.size),
            CacheOrdering::SizeHeight => (e.measure.size, e.measure.height),
        };
        key(a).cmp(&key(b)).then(a.seq.cmp(&b.seq)).then_with(|| a.lemma.cmp(&b.lemma))
    }
}

/// What one [`Cache::update`] removed.
#[derive(Clone, Debug, Default)]
pub struct Deleted {
    pub subsumed: Vec<CacheEntry>,
    pub dim_limited: Vec<CacheEntry>,
    pub trimmed: Vec<CacheEntry>,
}

impl Deleted {
    pub fn total(&self) -> usize {
        self.subsumed.len() + self.dim_limited.len() + self.trimmed.len()
    }
}

/// The engine's cache: one slot per completed level, plus the residual
/// store of entries evicted by the dimension limit or by capacity.
#[derive(Clone, Debug, Default)]
pub struct Cache {
    levels: Vec<Vec<CacheEntry>>,
    residual: Vec<CacheEntry>,
    next_seq: u64,
}

fn could_subsume(general: &CacheEntry, specific: &CacheEntry) -> bool {
    general.measure.size <= specific.measure.size
        && general.measure.height <= specific.measure.height
        && general.lemma.subsumes(&specific.lemma)
}

impl Cache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn level(&self, level: usize) -> &[CacheEntry] {
        self.entries(level)
    }

    pub fn levels(&self) -> &[Vec<CacheEntry>] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &CacheEntry> {
        self.levels.iter().flatten()
    }

    pub fn residual(&self) -> &[CacheEntry] {
        &self.residual
    }

    /// Highest level that still holds an entry.
    pub fn max_nonempty_level(&self) -> Option<usize> {
        self.levels.iter().rposition(|l| !l.is_empty())
    }

    /// Adds the solutions of `level` (the next level to complete) and
    /// applies `policy` over the union of old and new entries.
    pub fn update(
        &mut self,
        level: usize,
        new_entries: Vec<CacheEntry>,
        policy: &CachePolicy,
        input_max: FormulaMeasure,
    ) -> Deleted {
        assert_eq!(level, self.levels.len(), "levels are completed in order");
        let mut deleted = Deleted::default();

        let mut fresh = Vec::with_capacity(new_entries.len());
        for mut e in new_entries {
            e.level = level;
            e.seq = self.next_seq;
            self.next_seq += 1;
            if policy.exceeds_dim_limit(e.measure, input_max) {
                deleted.dim_limited.push(e);
            } else {
                fresh.push(e);
            }
        }

        self.levels.push(Vec::new());
        if policy.subsumption_delete {
            self.add_with_subsumption(level, fresh, &mut deleted);
        } else {
            self.levels[level] = fresh;
        }

        if let Some(cap) = policy.capacity {
            if self.len() > cap {
                let mut all: Vec<CacheEntry> = self.levels.iter_mut().flat_map(std::mem::take).collect();
                all.sort_by(|a, b| policy.compare(a, b));
                deleted.trimmed.extend(all.drain(cap..));
                // Keep insertion order within each level.
                all.sort_by_key(|e| e.seq);
                for e in all {
                    let l = e.level;
                    self.levels[l].push(e);
                }
            }
        }

        if policy.keep_residual {
            self.residual.extend(deleted.dim_limited.iter().cloned());
            self.residual.extend(deleted.trimmed.iter().cloned());
        }
        deleted
    }

    fn add_with_subsumption(&mut self, level: usize, fresh: Vec<CacheEntry>, deleted: &mut Deleted) {
        let mut variants: HashSet<Formula> = self.iter().map(|e| e.lemma.clone()).collect();
        for e in fresh {
            if variants.contains(&e.lemma) || self.iter().any(|c| could_subsume(c, &e)) {
                deleted.subsumed.push(e);
                continue;
            }
            // Old entries strictly more specific than the newcomer go too.
            for l in self.levels.iter_mut() {
                let mut i = 0;
                while i < l.len() {
                    if could_subsume(&e, &l[i]) {
                        let gone = l.remove(i);
                        variants.remove(&gone.lemma);
                        deleted.subsumed.push(gone);
                    } else {
                        i += 1;
                    }
                }
            }
            variants.insert(e.lemma.clone());
            self.levels[level].push(e);
        }
    }

    /// Residual entries whose lemma subsumes `goal`.
    pub fn residual_query(&self, goal: &Formula) -> Vec<&CacheEntry> {
        self.residual.iter().filter(|e| e.lemma.subsumes(goal)).collect()
    }
}

impl LevelCache for Cache {
    fn frontier(&self) -> usize {
        self.levels.len()
    }

    fn entries(&self, level: usize) -> &[CacheEntry] {
        self.levels.get(level).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_polish, SymbolTable};

    fn entry(s: &str, proof: u32) -> CacheEntry {
        let f = parse_polish(s, &SymbolTable::standard()).unwrap();
        CacheEntry::new(f, DTerm::axiom(proof), 0)
    }

    fn lemmas(c: &Cache) -> Vec<Formula> {
        c.iter().map(|e| e.lemma.clone()).collect()
    }

    #[test]
    fn subsumed_newcomer_is_deleted() {
        let mut c = Cache::new();
        let policy = CachePolicy { subsumption_delete: true, ..CachePolicy::unrestricted() };
        c.update(0, vec![entry("CpCqp", 1)], &policy, FormulaMeasure::default());
        let d = c.update(1, vec![entry("CCppCqCpp", 2)], &policy, FormulaMeasure::default());
        assert_eq!(d.subsumed.len(), 1);
        assert_eq!(c.len(), 1);
        // A more general newcomer evicts the older, more specific entry.
        let d = c.update(2, vec![entry("Cpq", 3)], &policy, FormulaMeasure::default());
        assert_eq!(d.subsumed.len(), 1);
        assert_eq!(lemmas(&c), vec![entry("Cpq", 0).lemma]);
    }

    #[test]
    fn capacity_trims_the_greater_entry() {
        let mut c = Cache::new();
        let policy =
            CachePolicy { capacity: Some(1), keep_residual: true, ..CachePolicy::unrestricted() };
        let d = c.update(
            0,
            vec![entry("CCpqCqp", 1), entry("CpNp", 2)],
            &policy,
            FormulaMeasure::default(),
        );
        // CpNp has height 2 like CCpqCqp but size 2 < 3.
        assert_eq!(d.trimmed.len(), 1);
        assert_eq!(lemmas(&c), vec![entry("CpNp", 0).lemma]);
        assert_eq!(c.residual().len(), 1);
    }

    #[test]
    fn dimension_limit_on_arrival() {
        let mut c = Cache::new();
        let policy = CachePolicy { dim_limit_factor: Some(5.0), ..CachePolicy::unrestricted() };
        let input = FormulaMeasure { size: 6, height: 100 };
        let mut big = String::new();
        for _ in 0..31 {
            big.push('N');
        }
        big.push('p');
        let big_entry = entry(&big, 1);
        assert_eq!(big_entry.measure.size, 31);
        let d = c.update(0, vec![big_entry, entry("Cpp", 1)], &policy, input);
        assert_eq!(d.dim_limited.len(), 1);
        assert_eq!(c.len(), 1);
        assert!(policy.validate().is_ok());
        assert!(CachePolicy { capacity: Some(0), ..policy }.validate().is_err());
    }

    #[test]
    fn residual_lookup() {
        let mut c = Cache::new();
        assert!(c.residual_query(&entry("Cpp", 0).lemma).is_empty());
        let policy =
            CachePolicy { capacity: Some(1), keep_residual: true, ..CachePolicy::unrestricted() };
        c.update(0, vec![entry("Cpp", 1), entry("CpCqp", 2)], &policy, FormulaMeasure::default());
        let mut t = SymbolTable::standard();
        let goal = crate::formula::parse_goal("CaCba", &mut t).unwrap();
        let hits = c.residual_query(&goal);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].proof, DTerm::axiom(2));
    }
}
