//! First-order terms standing for propositional formulas inside the implicit
//! predicate `P`.

mod polish;
mod subst;
mod symbols;

pub use polish::{parse_goal, parse_polish, print_polish, PolishError};
pub use subst::{
    match_formula, rename_apart, unify, Substitution, UnifyFailure,
};
pub use symbols::{SymbolError, SymbolInfo, SymbolTable};

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

/// A formula variable. Variables of stored lemmas are numbered from zero in
/// first-occurrence order (see [`Formula::normalized`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

/// An interned function symbol, resolved through a [`SymbolTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(pub u32);

impl Sym {
    /// Implication. Every symbol table declares it first.
    pub const IMP: Sym = Sym(0);
    /// Negation, declared second in every table.
    pub const NOT: Sym = Sym(1);
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(Var),
    App(Sym, Arc<[Formula]>),
}

/// Size and height of a formula. Size counts function-symbol occurrences,
/// height is the longest root-to-leaf path in edges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormulaMeasure {
    pub size: usize,
    pub height: usize,
}

impl Formula {
    pub fn var(id: u32) -> Formula {
        Formula::Var(Var(id))
    }

    pub fn app(sym: Sym, args: Vec<Formula>) -> Formula {
        Formula::App(sym, args.into())
    }

    pub fn constant(sym: Sym) -> Formula {
        Formula::App(sym, Arc::from(Vec::new()))
    }

    pub fn imp(antecedent: Formula, consequent: Formula) -> Formula {
        Formula::App(Sym::IMP, Arc::from(vec![antecedent, consequent]))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Formula::Var(_))
    }

    /// Splits an implication into antecedent and consequent.
    pub fn as_imp(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::App(Sym::IMP, args) if args.len() == 2 => Some((&args[0], &args[1])),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::Var(_) => return false,
                Formula::App(_, args) => stack.extend(args.iter()),
            }
        }
        true
    }

    /// Variables in first-occurrence (pre-order, left to right) order.
    pub fn vars_in_order(&self) -> Vec<Var> {
        let mut seen = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::Var(v) => {
                    if !seen.contains(v) {
                        seen.push(*v);
                    }
                }
                Formula::App(_, args) => stack.extend(args.iter().rev()),
            }
        }
        seen
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.vars_in_order().into_iter().collect()
    }

    pub fn occurs(&self, v: Var) -> bool {
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::Var(w) if *w == v => return true,
                Formula::Var(_) => {}
                Formula::App(_, args) => stack.extend(args.iter()),
            }
        }
        false
    }

    pub fn measure(&self) -> FormulaMeasure {
        let mut size = 0;
        let mut height = 0;
        let mut stack = vec![(self, 0usize)];
        while let Some((f, depth)) = stack.pop() {
            height = height.max(depth);
            if let Formula::App(_, args) = f {
                size += 1;
                stack.extend(args.iter().map(|a| (a, depth + 1)));
            }
        }
        FormulaMeasure { size, height }
    }

    /// Applies a variable renaming; unmapped variables are kept.
    pub fn map_vars(&self, f: &mut impl FnMut(Var) -> Formula) -> Formula {
        match self {
            Formula::Var(v) => f(*v),
            Formula::App(s, args) => {
                Formula::App(*s, args.iter().map(|a| a.map_vars(f)).collect())
            }
        }
    }

    /// Canonical variant: variables renumbered `0..k` in first-occurrence order.
    /// Two formulas are variants of each other iff their normalized forms are equal.
    pub fn normalized(&self) -> Formula {
        let order = self.vars_in_order();
        let index: HashMap<Var, u32> =
            order.iter().enumerate().map(|(i, v)| (*v, i as u32)).collect();
        self.map_vars(&mut |v| Formula::var(index[&v]))
    }

    pub fn var_count(&self) -> usize {
        self.vars_in_order().len()
    }

    /// Replaces each variable by a fresh constant; `constant_for` maps the
    /// variable to a symbol.
    pub fn ground_with(&self, constant_for: &mut impl FnMut(Var) -> Sym) -> Formula {
        self.map_vars(&mut |v| Formula::constant(constant_for(v)))
    }

    /// α-equivalence: equality up to a bijective variable renaming.
    pub fn is_variant_of(&self, other: &Formula) -> bool {
        self.normalized() == other.normalized()
    }

    /// True when `self` subsumes `other`, i.e. some substitution instantiates
    /// `self` to `other`.
    pub fn subsumes(&self, other: &Formula) -> bool {
        match_formula(self, other).is_ok()
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(v) => write!(f, "_{}", v.0),
            Formula::App(s, args) if args.is_empty() => write!(f, "#{}", s.0),
            Formula::App(s, args) => {
                write!(f, "#{}(", s.0)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a:?}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SymbolTable {
        SymbolTable::standard()
    }

    fn p(s: &str) -> Formula {
        parse_polish(s, &table()).unwrap()
    }

    #[test]
    fn measure_conventions() {
        assert_eq!(p("p").measure(), FormulaMeasure { size: 0, height: 0 });
        assert_eq!(p("CpCqp").measure(), FormulaMeasure { size: 2, height: 2 });
        // ((p⇒q)⇒r)⇒((r⇒p)⇒(s⇒p)): six implications, deepest leaf three edges down.
        assert_eq!(p("CCCpqrCCrpCsp").measure(), FormulaMeasure { size: 6, height: 3 });
    }

    #[test]
    fn normalization_is_first_occurrence_order() {
        let f = Formula::imp(Formula::var(7), Formula::imp(Formula::var(3), Formula::var(7)));
        assert_eq!(f.normalized(), p("CpCqp"));
        assert!(f.is_variant_of(&p("CqCpq")));
        assert!(!f.is_variant_of(&p("CpCpp")));
    }

    #[test]
    fn groundness() {
        assert!(!p("Cpp").is_ground());
        let g = p("Cpp").ground_with(&mut |_| Sym(2));
        assert!(g.is_ground());
    }
}
