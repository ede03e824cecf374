//! Most general theorems of D-terms, in-place theorems, verification against
//! ground goals, and n-simplification.
//!
//! The MGT of `D(major, minor)` is `Y` where the major premise's formula is
//! unified with `X ⇒ Y` and the minor premise's formula with `X`; a leaf
//! contributes a fresh copy of its axiom. Everything runs on an explicit
//! stack, so proof height is not bounded by the call stack.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::dterm::{AxiomId, DTerm, Side};
use crate::formula::{
    match_formula, parse_polish, print_polish, Formula, FormulaMeasure, PolishError,
    Substitution, SymbolTable,
};
use crate::store::{Store, TermRef};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MgtError {
    #[error("unknown axiom {0}")]
    UnknownAxiom(AxiomId),
    #[error("the D-term has no most general theorem")]
    NoMgt,
    #[error("no node at the given position")]
    BadPosition,
}

/// Axioms by id, each normalized, together with the symbol table their
/// formulas are written in.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomBase {
    symbols: SymbolTable,
    axioms: BTreeMap<AxiomId, Formula>,
}

impl AxiomBase {
    pub fn new(symbols: SymbolTable) -> Self {
        AxiomBase { symbols, axioms: BTreeMap::new() }
    }

    /// Axioms numbered `1..` in the given order, over the standard symbols.
    pub fn from_polish(formulas: &[&str]) -> Result<Self, PolishError> {
        Self::from_polish_with(SymbolTable::standard(), formulas)
    }

    pub fn from_polish_with(symbols: SymbolTable, formulas: &[&str]) -> Result<Self, PolishError> {
        let mut base = AxiomBase::new(symbols);
        for (i, text) in formulas.iter().enumerate() {
            let f = parse_polish(text, &base.symbols)?;
            base.insert(AxiomId(i as u32 + 1), f);
        }
        Ok(base)
    }

    pub fn insert(&mut self, id: AxiomId, formula: Formula) {
        self.axioms.insert(id, formula.normalized());
    }

    pub fn get(&self, id: AxiomId) -> Option<&Formula> {
        self.axioms.get(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (AxiomId, &Formula)> {
        self.axioms.iter().map(|(id, f)| (*id, f))
    }

    pub fn ids(&self) -> impl Iterator<Item = AxiomId> + '_ {
        self.axioms.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    /// The smallest axiom id: the primitive subproof that stands in for `n`.
    pub fn first_id(&self) -> Option<AxiomId> {
        self.axioms.keys().next().copied()
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn symbols_mut(&mut self) -> &mut SymbolTable {
        &mut self.symbols
    }

    pub fn polish(&self, f: &Formula) -> String {
        print_polish(f, &self.symbols)
    }

    /// Componentwise maximum of the axiom measures.
    pub fn max_measure(&self) -> FormulaMeasure {
        self.axioms.values().map(Formula::measure).fold(FormulaMeasure::default(), |a, m| {
            FormulaMeasure { size: a.size.max(m.size), height: a.height.max(m.height) }
        })
    }

    /// `d` with every `N` replaced by the first axiom.
    pub fn fill_n(&self, d: &DTerm) -> DTerm {
        match self.first_id() {
            Some(id) => d.replace_n(&DTerm::Axiom(id)),
            None => d.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MgtResult {
    /// Normalized conclusion.
    pub conclusion: Formula,
}

/// Term for every node in post-order plus the root term.
pub(crate) struct Solution {
    pub nodes: Vec<TermRef>,
    pub root: TermRef,
}

/// Solves the detachment constraints of `d` in `store`. `N` leaves get
/// unconstrained variables.
pub(crate) fn solve(
    store: &mut Store,
    d: &DTerm,
    axioms: &AxiomBase,
    keep_nodes: bool,
) -> Result<Solution, MgtError> {
    enum Frame<'a> {
        Enter(&'a DTerm),
        Combine,
    }
    let mut nodes = Vec::new();
    let mut results: Vec<TermRef> = Vec::new();
    let mut stack = vec![Frame::Enter(d)];
    while let Some(frame) = stack.pop() {
        let term = match frame {
            Frame::Enter(DTerm::Axiom(id)) => {
                let f = axioms.get(*id).ok_or(MgtError::UnknownAxiom(*id))?;
                store.import(f)
            }
            Frame::Enter(DTerm::N) => store.fresh_var(),
            Frame::Enter(DTerm::D(a, b)) => {
                stack.push(Frame::Combine);
                stack.push(Frame::Enter(b));
                stack.push(Frame::Enter(a));
                continue;
            }
            Frame::Combine => {
                let minor = results.pop().expect("minor premise");
                let major = results.pop().expect("major premise");
                let conclusion = store.fresh_var();
                let expected = store.imp(minor, conclusion);
                if !store.unify(major, expected) {
                    return Err(MgtError::NoMgt);
                }
                conclusion
            }
        };
        if keep_nodes {
            nodes.push(term);
        }
        results.push(term);
    }
    let root = results.pop().expect("root");
    Ok(Solution { nodes, root })
}

/// The most general theorem of `d`. `N` leaves are unconstrained.
pub fn mgt(d: &DTerm, axioms: &AxiomBase) -> Result<MgtResult, MgtError> {
    let mut store = Store::new();
    let sol = solve(&mut store, d, axioms, false)?;
    Ok(MgtResult { conclusion: store.extract(sol.root) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InPlaceTheorem {
    pub formula: Formula,
    /// The position holds `n`; the formula is then an unconstrained
    /// variable unless the context pins it down.
    pub at_n: bool,
}

/// The formula at `path` under the most general solution of the whole proof.
pub fn ipt(d: &DTerm, path: &[Side], axioms: &AxiomBase) -> Result<InPlaceTheorem, MgtError> {
    let target = d.at(path).ok_or(MgtError::BadPosition)?;
    let idx = d.postorder_index(path).ok_or(MgtError::BadPosition)?;
    let mut store = Store::new();
    let sol = solve(&mut store, d, axioms, true)?;
    Ok(InPlaceTheorem {
        formula: store.extract(sol.nodes[idx]),
        at_n: matches!(target, DTerm::N),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyOutcome {
    Pass { mgt: Formula, substitution: Substitution },
    NotSubsumed { mgt: Formula },
    NoMgt,
    UnknownAxiom(AxiomId),
    GoalNotGround,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub goal: Formula,
    pub outcome: VerifyOutcome,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        matches!(self.outcome, VerifyOutcome::Pass { .. })
    }

    pub fn render(&self, symbols: &SymbolTable) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "goal\t{}", print_polish(&self.goal, symbols));
        match &self.outcome {
            VerifyOutcome::Pass { mgt, substitution } => {
                let _ = writeln!(out, "result\tpass");
                let _ = writeln!(out, "mgt\t{}", print_polish(mgt, symbols));
                for (v, f) in substitution.iter() {
                    let _ = writeln!(
                        out,
                        "binding\t{} := {}",
                        print_polish(&Formula::Var(*v), symbols),
                        print_polish(f, symbols)
                    );
                }
            }
            VerifyOutcome::NotSubsumed { mgt } => {
                let _ = writeln!(out, "result\tfail");
                let _ = writeln!(out, "reason\tmgt does not subsume goal");
                let _ = writeln!(out, "mgt\t{}", print_polish(mgt, symbols));
            }
            VerifyOutcome::NoMgt => {
                let _ = writeln!(out, "result\tfail\nreason\tno mgt");
            }
            VerifyOutcome::UnknownAxiom(id) => {
                let _ = writeln!(out, "result\tfail\nreason\tunknown axiom {id}");
            }
            VerifyOutcome::GoalNotGround => {
                let _ = writeln!(out, "result\tfail\nreason\tgoal is not ground");
            }
        }
        out
    }
}

/// Checks that the MGT of `d` (with `n` filled by the first axiom) subsumes
/// the ground `goal`.
pub fn verify(d: &DTerm, axioms: &AxiomBase, goal: &Formula) -> VerifyReport {
    let outcome = if !goal.is_ground() {
        VerifyOutcome::GoalNotGround
    } else {
        match mgt(&axioms.fill_n(d), axioms) {
            Err(MgtError::UnknownAxiom(id)) => VerifyOutcome::UnknownAxiom(id),
            Err(_) => VerifyOutcome::NoMgt,
            Ok(MgtResult { conclusion }) => match match_formula(&conclusion, goal) {
                Ok(substitution) => VerifyOutcome::Pass { mgt: conclusion, substitution },
                Err(_) => VerifyOutcome::NotSubsumed { mgt: conclusion },
            },
        }
    };
    VerifyReport { goal: goal.clone(), outcome }
}

/// Is the minor premise at `path` irrelevant for the conclusion of `d`?
/// The subtree is cut out (replaced by `n`); it is irrelevant when its slot
/// then holds a bare variable that does not occur in the root conclusion.
fn minor_is_irrelevant(d: &DTerm, path: &[Side], axioms: &AxiomBase) -> Result<bool, MgtError> {
    let cut = d.replace_at(path, DTerm::N).ok_or(MgtError::BadPosition)?;
    let idx = cut.postorder_index(path).ok_or(MgtError::BadPosition)?;
    let mut store = Store::new();
    let sol = solve(&mut store, &cut, axioms, true)?;
    let slot = store.deref(sol.nodes[idx]);
    Ok(store.is_unbound(slot) && !store.occurs(slot, sol.root))
}

/// Replaces irrelevant minor subproofs by the first axiom until nothing
/// changes.
pub fn n_simplify(d: &DTerm, axioms: &AxiomBase) -> Result<DTerm, MgtError> {
    mgt(d, axioms)?;
    let primitive = DTerm::Axiom(axioms.first_id().ok_or(MgtError::NoMgt)?);
    let mut current = d.clone();
    'outer: loop {
        for path in current.positions() {
            if path.last() != Some(&Side::Minor) {
                continue;
            }
            let Some(sub) = current.at(&path) else { continue };
            if sub.is_leaf() {
                continue;
            }
            if minor_is_irrelevant(&current, &path, axioms)? {
                current = current.replace_at(&path, primitive.clone()).expect("valid path");
                continue 'outer;
            }
        }
        return Ok(current);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dterm::parse_dnotation;
    use crate::formula::parse_goal;

    fn dt(s: &str) -> DTerm {
        parse_dnotation(s).unwrap()
    }

    fn simp() -> AxiomBase {
        AxiomBase::from_polish(&["CpCqp"]).unwrap()
    }

    fn p(base: &AxiomBase, s: &str) -> Formula {
        parse_polish(s, base.symbols()).unwrap()
    }

    #[test]
    fn mgt_of_d11() {
        let base = simp();
        let m = mgt(&dt("D11"), &base).unwrap();
        assert_eq!(m.conclusion, p(&base, "CpCqCrq"));
        assert_eq!(mgt(&dt("1"), &base).unwrap().conclusion, p(&base, "CpCqp"));
        assert_eq!(mgt(&dt("2"), &base), Err(MgtError::UnknownAxiom(AxiomId(2))));
    }

    #[test]
    fn no_mgt_detected() {
        let base = AxiomBase::from_polish(&["CpCqp", "CpNp"]).unwrap();
        assert!(mgt(&dt("D21"), &base).is_ok());
        // D22 proves ¬(s⇒¬s), which cannot serve as a major premise.
        assert_eq!(mgt(&dt("DD221"), &base), Err(MgtError::NoMgt));
    }

    #[test]
    fn verify_examples() {
        let mut base = simp();
        let goal = parse_goal("CaCCbcCaCbc", base.symbols_mut()).unwrap();
        assert!(verify(&dt("D11"), &base, &goal).passed());
        let aa = parse_goal("Caa", base.symbols_mut()).unwrap();
        assert!(matches!(
            verify(&dt("1"), &base, &aa).outcome,
            VerifyOutcome::NotSubsumed { .. }
        ));
        let open = p(&base, "Cpp");
        assert_eq!(verify(&dt("1"), &base, &open).outcome, VerifyOutcome::GoalNotGround);
    }

    #[test]
    fn ipt_positions() {
        let base = simp();
        let d = dt("D11");
        assert_eq!(ipt(&d, &[], &base).unwrap().formula, mgt(&d, &base).unwrap().conclusion);
        // The minor premise of D(1,1) is an instance of the axiom, p⇒(q⇒p),
        // and the major premise is that formula implying the conclusion.
        let minor = ipt(&d, &[Side::Minor], &base).unwrap();
        assert_eq!(minor.formula, p(&base, "CpCqp"));
        let major = ipt(&d, &[Side::Major], &base).unwrap();
        assert_eq!(major.formula, p(&base, "CCpCqpCrCpCqp"));
        assert!(ipt(&d, &[Side::Minor, Side::Major], &base).is_err());
    }

    #[test]
    fn n_simplify_keeps_relevant_minor() {
        let base = simp();
        assert_eq!(n_simplify(&dt("D11"), &base).unwrap(), dt("D11"));
    }

    #[test]
    fn n_simplify_cuts_irrelevant_minor() {
        let base = simp();
        // mgt(D11) = p⇒(q⇒(r⇒q)); p does not occur in the consequent, so the
        // minor premise of D(D11, _) is irrelevant.
        let d = dt("DD11DD11D1D11");
        let s = n_simplify(&d, &base).unwrap();
        assert_eq!(s, dt("DD111"));
        let before = mgt(&d, &base).unwrap().conclusion;
        let after = mgt(&s, &base).unwrap().conclusion;
        assert!(after.subsumes(&before));
        assert_eq!(n_simplify(&s, &base).unwrap(), s);
    }
}
