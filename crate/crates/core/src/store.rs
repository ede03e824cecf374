//! Mutable term store with a binding trail, used on the hot paths (MGT
//! computation and structure generation). Bindings made after a [`Mark`] are
//! undone by [`Store::undo`], which gives Prolog-style backtracking.

use crate::formula::{Formula, Sym, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TermRef(u32);

const UNBOUND: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
enum Cell {
    Var(u32),
    App { sym: Sym, start: u32, arity: u32 },
}

#[derive(Clone, Copy, Debug)]
pub struct Mark {
    cells: usize,
    args: usize,
    trail: usize,
}

#[derive(Default)]
pub struct Store {
    cells: Vec<Cell>,
    args: Vec<TermRef>,
    trail: Vec<u32>,
    pairs: Vec<(TermRef, TermRef)>,
    scan: Vec<TermRef>,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mark(&self) -> Mark {
        Mark { cells: self.cells.len(), args: self.args.len(), trail: self.trail.len() }
    }

    pub fn undo(&mut self, mark: Mark) {
        for &v in &self.trail[mark.trail..] {
            if (v as usize) < mark.cells {
                self.cells[v as usize] = Cell::Var(UNBOUND);
            }
        }
        self.trail.truncate(mark.trail);
        self.cells.truncate(mark.cells);
        self.args.truncate(mark.args);
    }

    pub fn fresh_var(&mut self) -> TermRef {
        let r = TermRef(self.cells.len() as u32);
        self.cells.push(Cell::Var(UNBOUND));
        r
    }

    /// Allocates `n` consecutive unbound variables and returns the first index.
    pub fn fresh_vars(&mut self, n: usize) -> u32 {
        let base = self.cells.len() as u32;
        self.cells.extend(std::iter::repeat_n(Cell::Var(UNBOUND), n));
        base
    }

    pub fn app(&mut self, sym: Sym, args: &[TermRef]) -> TermRef {
        let start = self.args.len() as u32;
        self.args.extend_from_slice(args);
        let r = TermRef(self.cells.len() as u32);
        self.cells.push(Cell::App { sym, start, arity: args.len() as u32 });
        r
    }

    pub fn imp(&mut self, a: TermRef, b: TermRef) -> TermRef {
        self.app(Sym::IMP, &[a, b])
    }

    pub fn deref(&self, mut t: TermRef) -> TermRef {
        while let Cell::Var(b) = self.cells[t.0 as usize] {
            if b == UNBOUND {
                break;
            }
            t = TermRef(b);
        }
        t
    }

    pub fn is_unbound(&self, t: TermRef) -> bool {
        let t = self.deref(t);
        matches!(self.cells[t.0 as usize], Cell::Var(UNBOUND))
    }

    fn bind(&mut self, var: TermRef, value: TermRef) {
        self.cells[var.0 as usize] = Cell::Var(value.0);
        self.trail.push(var.0);
    }

    /// Does the unbound variable `v` occur in `t` (through bindings)?
    pub fn occurs(&mut self, v: TermRef, t: TermRef) -> bool {
        let mut scan = std::mem::take(&mut self.scan);
        scan.clear();
        scan.push(t);
        let mut found = false;
        while let Some(t) = scan.pop() {
            let t = self.deref(t);
            match self.cells[t.0 as usize] {
                Cell::Var(_) => {
                    if t == v {
                        found = true;
                        break;
                    }
                }
                Cell::App { start, arity, .. } => {
                    scan.extend_from_slice(&self.args[start as usize..(start + arity) as usize]);
                }
            }
        }
        self.scan = scan;
        found
    }

    /// Unifies two store terms with occurs check. On failure, partial
    /// bindings remain; callers undo to a mark.
    pub fn unify(&mut self, a: TermRef, b: TermRef) -> bool {
        let mut pairs = std::mem::take(&mut self.pairs);
        pairs.clear();
        pairs.push((a, b));
        let mut ok = true;
        while let Some((a, b)) = pairs.pop() {
            let a = self.deref(a);
            let b = self.deref(b);
            if a == b {
                continue;
            }
            match (self.cells[a.0 as usize], self.cells[b.0 as usize]) {
                (Cell::Var(_), _) => {
                    if self.occurs(a, b) {
                        ok = false;
                        break;
                    }
                    self.bind(a, b);
                }
                (_, Cell::Var(_)) => {
                    if self.occurs(b, a) {
                        ok = false;
                        break;
                    }
                    self.bind(b, a);
                }
                (
                    Cell::App { sym: f, start: sa, arity: na },
                    Cell::App { sym: g, start: sb, arity: nb },
                ) => {
                    if f != g || na != nb {
                        ok = false;
                        break;
                    }
                    for i in 0..na {
                        pairs.push((self.args[(sa + i) as usize], self.args[(sb + i) as usize]));
                    }
                }
            }
        }
        self.pairs = pairs;
        ok
    }

    /// Copies `f` into the store; formula variable `i` becomes cell `base + i`,
    /// which the caller must have allocated.
    pub fn build(&mut self, f: &Formula, base: u32) -> TermRef {
        match f {
            Formula::Var(v) => TermRef(base + v.0),
            Formula::App(sym, args) => {
                let mut refs = Vec::with_capacity(args.len());
                for a in args.iter() {
                    refs.push(self.build(a, base));
                }
                self.app(*sym, &refs)
            }
        }
    }

    /// Copies `f` with fresh variables. `f` need not be normalized.
    pub fn import(&mut self, f: &Formula) -> TermRef {
        let width = f.vars_in_order().iter().map(|v| v.0 + 1).max().unwrap_or(0);
        let base = self.fresh_vars(width as usize);
        self.build(f, base)
    }

    /// Unifies a fresh copy of the normalized pattern `pat` (with `nvars`
    /// variables) against `t`, copying pattern structure into the store
    /// only where `t` has an unbound variable.
    pub fn unify_pattern(&mut self, pat: &Formula, nvars: usize, t: TermRef) -> bool {
        let base = self.fresh_vars(nvars);
        let mut work: Vec<(&Formula, TermRef)> = vec![(pat, t)];
        while let Some((p, t)) = work.pop() {
            match p {
                Formula::Var(v) => {
                    if !self.unify(TermRef(base + v.0), t) {
                        return false;
                    }
                }
                Formula::App(f, ps) => {
                    let t = self.deref(t);
                    match self.cells[t.0 as usize] {
                        Cell::Var(_) => {
                            let built = self.build(p, base);
                            if self.occurs(t, built) {
                                return false;
                            }
                            self.bind(t, built);
                        }
                        Cell::App { sym, start, arity } => {
                            if sym != *f || arity as usize != ps.len() {
                                return false;
                            }
                            for (i, sub) in ps.iter().enumerate() {
                                work.push((sub, self.args[start as usize + i]));
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Reads `t` back as a normalized formula.
    pub fn extract(&self, t: TermRef) -> Formula {
        let mut names: Vec<TermRef> = Vec::new();
        self.extract_with(t, &mut names)
    }

    /// Like [`Store::extract`], numbering variables through a shared table so
    /// several terms can be read back consistently.
    pub fn extract_with(&self, t: TermRef, names: &mut Vec<TermRef>) -> Formula {
        let t = self.deref(t);
        match self.cells[t.0 as usize] {
            Cell::Var(_) => {
                let idx = match names.iter().position(|&n| n == t) {
                    Some(i) => i,
                    None => {
                        names.push(t);
                        names.len() - 1
                    }
                };
                Formula::Var(Var(idx as u32))
            }
            Cell::App { sym, start, arity } => {
                let args: Vec<Formula> = (0..arity)
                    .map(|i| self.extract_with(self.args[(start + i) as usize], names))
                    .collect();
                Formula::app(sym, args)
            }
        }
    }
}
