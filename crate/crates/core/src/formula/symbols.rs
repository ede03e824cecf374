use std::collections::HashMap;

use thiserror::Error;

use super::Sym;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolInfo {
    pub name: String,
    pub arity: usize,
    /// Uppercase letter used in Polish notation, if any.
    pub letter: Option<char>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymbolError {
    #[error("line {line}: expected `<Letter> <name> <arity>`")]
    Malformed { line: usize },
    #[error("line {line}: Polish letter `{letter}` must be an uppercase ASCII letter")]
    BadLetter { line: usize, letter: String },
    #[error("symbol `{name}` already declared with arity {existing}, not {requested}")]
    ArityConflict { name: String, existing: usize, requested: usize },
    #[error("Polish letter `{letter}` already bound to `{bound}`")]
    LetterTaken { letter: char, bound: String },
}

/// Function symbols with their arities and Polish letters.
///
/// `imp/2` is always `Sym(0)` and `not/1` is always `Sym(1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolTable {
    entries: Vec<SymbolInfo>,
    by_name: HashMap<String, Sym>,
    by_letter: HashMap<char, Sym>,
}

const STANDARD: &[(char, &str, usize)] = &[
    ('C', "imp", 2),
    ('N', "not", 1),
    ('K', "and", 2),
    ('A', "or", 2),
    ('E', "equiv", 2),
];

// Order in which letters are handed out to symbols interned without one.
const SPARE_LETTERS: &str = "FGHIJLMOQRSTUVWXYZBDP";

impl Default for SymbolTable {
    fn default() -> Self {
        Self::standard()
    }
}

impl SymbolTable {
    /// `C`/imp, `N`/not, `K`/and, `A`/or, `E`/equiv.
    pub fn standard() -> Self {
        let mut table = SymbolTable {
            entries: Vec::new(),
            by_name: HashMap::new(),
            by_letter: HashMap::new(),
        };
        for &(letter, name, arity) in STANDARD {
            table.declare(letter, name, arity).expect("standard table is consistent");
        }
        table
    }

    /// Extends the table with declaration lines `<Letter> <name> <arity>`.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn load_declarations(&mut self, text: &str) -> Result<(), SymbolError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [letter, name, arity] = fields[..] else {
                return Err(SymbolError::Malformed { line: i + 1 });
            };
            let mut chars = letter.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(SymbolError::BadLetter { line: i + 1, letter: letter.into() });
            };
            if !c.is_ascii_uppercase() {
                return Err(SymbolError::BadLetter { line: i + 1, letter: letter.into() });
            }
            let arity = arity.parse().map_err(|_| SymbolError::Malformed { line: i + 1 })?;
            self.declare(c, name, arity)?;
        }
        Ok(())
    }

    /// Declares `name/arity` with Polish letter `letter`. Re-declaring an
    /// identical entry is a no-op.
    pub fn declare(&mut self, letter: char, name: &str, arity: usize) -> Result<Sym, SymbolError> {
        if let Some(&sym) = self.by_letter.get(&letter) {
            let info = &self.entries[sym.0 as usize];
            if info.name == name && info.arity == arity {
                return Ok(sym);
            }
            return Err(SymbolError::LetterTaken { letter, bound: info.name.clone() });
        }
        if let Some(&sym) = self.by_name.get(name) {
            let info = &self.entries[sym.0 as usize];
            if info.arity != arity {
                return Err(SymbolError::ArityConflict {
                    name: name.into(),
                    existing: info.arity,
                    requested: arity,
                });
            }
            if let Some(old) = info.letter {
                return Err(SymbolError::LetterTaken { letter: old, bound: name.into() });
            }
            self.entries[sym.0 as usize].letter = Some(letter);
            self.by_letter.insert(letter, sym);
            return Ok(sym);
        }
        let sym = self.push(name, arity, Some(letter));
        Ok(sym)
    }

    /// Looks up `name`, or adds it. Function symbols (arity > 0) get a spare
    /// Polish letter when one is left; constants never get one.
    pub fn intern(&mut self, name: &str, arity: usize) -> Result<Sym, SymbolError> {
        if let Some(&sym) = self.by_name.get(name) {
            let existing = self.entries[sym.0 as usize].arity;
            if existing != arity {
                return Err(SymbolError::ArityConflict {
                    name: name.into(),
                    existing,
                    requested: arity,
                });
            }
            return Ok(sym);
        }
        let letter = if arity > 0 {
            SPARE_LETTERS.chars().find(|c| !self.by_letter.contains_key(c))
        } else {
            None
        };
        Ok(self.push(name, arity, letter))
    }

    fn push(&mut self, name: &str, arity: usize, letter: Option<char>) -> Sym {
        let sym = Sym(self.entries.len() as u32);
        self.entries.push(SymbolInfo { name: name.into(), arity, letter });
        self.by_name.insert(name.into(), sym);
        if let Some(c) = letter {
            self.by_letter.insert(c, sym);
        }
        sym
    }

    pub fn info(&self, sym: Sym) -> &SymbolInfo {
        &self.entries[sym.0 as usize]
    }

    pub fn name(&self, sym: Sym) -> &str {
        &self.entries[sym.0 as usize].name
    }

    pub fn arity(&self, sym: Sym) -> usize {
        self.entries[sym.0 as usize].arity
    }

    pub fn by_letter(&self, letter: char) -> Option<Sym> {
        self.by_letter.get(&letter).copied()
    }

    pub fn by_name(&self, name: &str) -> Option<Sym> {
        self.by_name.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Sym, &SymbolInfo)> {
        self.entries.iter().enumerate().map(|(i, e)| (Sym(i as u32), e))
    }

    /// Declaration lines for every symbol that has a Polish letter.
    pub fn to_declarations(&self) -> String {
        let mut out = String::new();
        for (_, info) in self.iter() {
            if let Some(c) = info.letter {
                out.push_str(&format!("{c} {} {}\n", info.name, info.arity));
            }
        }
        out
    }
}
