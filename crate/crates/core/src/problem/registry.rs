//! Named formulas, looked up up to variable renaming.
//!
//! One `name<TAB>polish` entry per line; `#` starts a comment. A name may
//! appear for several formulas and a formula under several names.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{parse_polish, print_polish, Formula, PolishError, SymbolTable};

const BUNDLED: &str = include_str!("../../data/registry.tsv");

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("line {line}: expected `name<TAB>formula`")]
    Syntax { line: usize },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: PolishError },
}

#[derive(Clone, Debug)]
pub struct Registry {
    symbols: SymbolTable,
    entries: Vec<(String, Formula)>,
    index: HashMap<Formula, Vec<usize>>,
}

impl Registry {
    pub fn new(symbols: SymbolTable) -> Self {
        Registry { symbols, entries: Vec::new(), index: HashMap::new() }
    }

    /// The registry shipped with the library.
    pub fn bundled() -> Self {
        Self::load(BUNDLED, SymbolTable::standard()).expect("bundled registry is well formed")
    }

    pub fn load(text: &str, symbols: SymbolTable) -> Result<Self, RegistryError> {
        let mut r = Self::new(symbols);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, polish) = line
                .split_once('\t')
                .or_else(|| line.split_once(char::is_whitespace))
                .ok_or(RegistryError::Syntax { line: i + 1 })?;
            let f = parse_polish(polish.trim(), &r.symbols)
                .map_err(|source| RegistryError::Formula { line: i + 1, source })?;
            r.insert(name.trim(), f);
        }
        Ok(r)
    }

    pub fn insert(&mut self, name: &str, formula: Formula) {
        let f = formula.normalized();
        let slot = self.index.entry(f.clone()).or_default();
        if slot.iter().any(|&i| self.entries[i].0 == name) {
            return;
        }
        slot.push(self.entries.len());
        self.entries.push((name.to_string(), f));
    }

    /// Names of formulas that are variants of `formula`.
    pub fn lookup(&self, formula: &Formula) -> Vec<&str> {
        self.index
            .get(&formula.normalized())
            .map(|ids| ids.iter().map(|&i| self.entries[i].0.as_str()).collect())
            .unwrap_or_default()
    }

    /// Formulas registered under `name`.
    pub fn formulas(&self, name: &str) -> Vec<&Formula> {
        self.entries.iter().filter(|(n, _)| n == name).map(|(_, f)| f).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.entries.iter().map(|(n, f)| (n.as_str(), f))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (n, f) in &self.entries {
            let _ = writeln!(out, "{n}\t{}", print_polish(f, &self.symbols));
        }
        out
    }
}
