use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::{Formula, Sym, Var};

/// Finite map from variables to formulas, kept in solved form: no bound
/// variable occurs in any right-hand side.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<Var, Formula>);

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum UnifyFailure {
    #[error("symbol clash: {left:?} vs {right:?}")]
    Clash { left: Sym, right: Sym },
    #[error("occurs check: variable {0:?} occurs in its binding")]
    Occurs(Var),
    /// Only produced by [`match_formula`]: the specific side is a variable
    /// where the general side has structure, or a variable would need two
    /// different values.
    #[error("no matching substitution")]
    NoMatch,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: Var) -> Option<&Formula> {
        self.0.get(&v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Formula)> {
        self.0.iter()
    }

    pub fn domain(&self) -> BTreeSet<Var> {
        self.0.keys().copied().collect()
    }

    pub fn apply(&self, f: &Formula) -> Formula {
        if self.0.is_empty() {
            return f.clone();
        }
        f.map_vars(&mut |v| self.0.get(&v).cloned().unwrap_or(Formula::Var(v)))
    }

    /// True when no binding is a trivial `x ↦ x`.
    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|(v, f)| *f == Formula::Var(*v))
    }
}

fn walk<'a>(bindings: &'a HashMap<Var, Formula>, mut f: &'a Formula) -> &'a Formula {
    while let Formula::Var(v) = f {
        match bindings.get(v) {
            Some(next) => f = next,
            None => break,
        }
    }
    f
}

fn occurs_under(bindings: &HashMap<Var, Formula>, v: Var, f: &Formula) -> bool {
    let mut stack = vec![f];
    while let Some(t) = stack.pop() {
        match walk(bindings, t) {
            Formula::Var(w) => {
                if *w == v {
                    return true;
                }
            }
            Formula::App(_, args) => stack.extend(args.iter()),
        }
    }
    false
}

fn resolve(bindings: &HashMap<Var, Formula>, f: &Formula) -> Formula {
    match walk(bindings, f) {
        Formula::Var(v) => Formula::Var(*v),
        Formula::App(s, args) => {
            Formula::App(*s, args.iter().map(|a| resolve(bindings, a)).collect())
        }
    }
}

/// Syntactic most general unifier with occurs check.
pub fn unify(a: &Formula, b: &Formula) -> Result<Substitution, UnifyFailure> {
    let mut bindings: HashMap<Var, Formula> = HashMap::new();
    let mut work = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = work.pop() {
        let x = walk(&bindings, &x).clone();
        let y = walk(&bindings, &y).clone();
        match (&x, &y) {
            (Formula::Var(v), Formula::Var(w)) if v == w => {}
            (Formula::Var(v), t) | (t, Formula::Var(v)) => {
                if occurs_under(&bindings, *v, t) {
                    return Err(UnifyFailure::Occurs(*v));
                }
                bindings.insert(*v, t.clone());
            }
            (Formula::App(f, xs), Formula::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return Err(UnifyFailure::Clash { left: *f, right: *g });
                }
                work.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
        }
    }
    let solved = bindings
        .keys()
        .map(|v| (*v, resolve(&bindings, &Formula::Var(*v))))
        .collect();
    Ok(Substitution(solved))
}

/// One-sided unification: finds σ with `general·σ = specific`, binding only
/// variables of `general`. Variables of `specific` are treated as constants.
pub fn match_formula(general: &Formula, specific: &Formula) -> Result<Substitution, UnifyFailure> {
    let mut bindings: BTreeMap<Var, Formula> = BTreeMap::new();
    let mut work = vec![(general, specific)];
    while let Some((g, s)) = work.pop() {
        match g {
            Formula::Var(v) => match bindings.get(v) {
                Some(bound) if bound != s => return Err(UnifyFailure::NoMatch),
                Some(_) => {}
                None => {
                    bindings.insert(*v, s.clone());
                }
            },
            Formula::App(f, gs) => match s {
                Formula::App(h, ss) if f == h && gs.len() == ss.len() => {
                    work.extend(gs.iter().zip(ss.iter()));
                }
                Formula::App(h, _) => return Err(UnifyFailure::Clash { left: *f, right: *h }),
                Formula::Var(_) => return Err(UnifyFailure::NoMatch),
            },
        }
    }
    Ok(Substitution(bindings))
}

/// A variant of `f` whose variables avoid `reserved`. Fresh identifiers are
/// the smallest unused ones, assigned in first-occurrence order.
pub fn rename_apart(f: &Formula, reserved: &BTreeSet<Var>) -> Formula {
    let mut next = 0u32;
    let mut map: HashMap<Var, Var> = HashMap::new();
    for v in f.vars_in_order() {
        while reserved.contains(&Var(next)) {
            next += 1;
        }
        map.insert(v, Var(next));
        next += 1;
    }
    f.map_vars(&mut |v| Formula::Var(map[&v]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_polish, SymbolTable};

    fn p(s: &str) -> Formula {
        parse_polish(s, &SymbolTable::standard()).unwrap()
    }

    #[test]
    fn variable_against_term_after_renaming_apart() {
        let a = p("p");
        let b = rename_apart(&p("Cpq"), &a.vars());
        let s = unify(&a, &b).unwrap();
        assert_eq!(s.apply(&a), s.apply(&b));
        assert_eq!(s.apply(&a), b);
    }

    #[test]
    fn clash_and_occurs() {
        let not_p = Formula::app(Sym::NOT, vec![Formula::var(0)]);
        assert!(matches!(unify(&p("Cpq"), &not_p), Err(UnifyFailure::Clash { .. })));
        assert_eq!(unify(&p("p"), &p("Cqp")), Err(UnifyFailure::Occurs(Var(0))));
    }

    #[test]
    fn matching() {
        let s = match_formula(&p("CpCqp"), &p("CaCba")).unwrap();
        assert_eq!(s.apply(&p("CpCqp")), p("CaCba"));
        assert_eq!(s.len(), 2);
        assert!(match_formula(&p("CpCqp"), &p("CpCqr")).is_err());
        for f in ["p", "CpCqp", "CCCpqrCCrpCsp"] {
            let s = match_formula(&p(f), &p(f)).unwrap();
            assert!(s.is_identity());
        }
    }

    #[test]
    fn renaming() {
        let reserved: BTreeSet<Var> = [Var(0)].into();
        assert_eq!(rename_apart(&p("Cpp"), &reserved), Formula::imp(Formula::var(1), Formula::var(1)));
        let ground = Formula::constant(Sym::NOT);
        assert_eq!(rename_apart(&ground, &reserved), ground);
        let r1 = rename_apart(&p("CpCqp"), &[Var(0), Var(1)].into());
        let r2 = rename_apart(&p("CpCqp"), &[Var(5), Var(9)].into());
        assert!(r1.is_variant_of(&r2));
    }

    #[test]
    fn solved_form_is_idempotent() {
        let s = unify(&p("CCpqCqr"), &p("CsCts")).unwrap();
        for (_, f) in s.iter() {
            assert_eq!(s.apply(f), *f);
        }
    }
}
