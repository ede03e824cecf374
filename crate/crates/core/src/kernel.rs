//! Independent proof checking by replaying a D-term as positive
//! hyperresolution steps with the clause `P(y) ← P(x⇒y) ∧ P(x)`.
//!
//! This path shares nothing with [`crate::mgt`] beyond the formula type: it
//! uses substitution-based unification on [`Formula`] values and plain
//! recursion.

use thiserror::Error;

use crate::dterm::{AxiomId, DTerm};
use crate::formula::{match_formula, rename_apart, unify, Formula, Var};
use crate::mgt::AxiomBase;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("unknown axiom {0}")]
    UnknownAxiom(AxiomId),
    #[error("hyperresolution step fails")]
    StepFails,
    #[error("`n` cannot be replayed without an axiom to stand in for it")]
    NoPrimitive,
}

/// The clause derived by `d`, as a unit formula.
pub fn replay(d: &DTerm, axioms: &AxiomBase) -> Result<Formula, ReplayError> {
    let derived = match d {
        DTerm::Axiom(id) => axioms.get(*id).cloned().ok_or(ReplayError::UnknownAxiom(*id))?,
        DTerm::N => {
            let id = axioms.first_id().ok_or(ReplayError::NoPrimitive)?;
            axioms.get(id).cloned().ok_or(ReplayError::UnknownAxiom(id))?
        }
        DTerm::D(major, minor) => {
            let major = replay(major, axioms)?;
            let minor = replay(minor, axioms)?;
            detach(&major, &minor)?
        }
    };
    Ok(derived.normalized())
}

/// Resolves the two premises against a fresh copy of the detachment clause.
fn detach(major: &Formula, minor: &Formula) -> Result<Formula, ReplayError> {
    let major = rename_apart(major, &Default::default());
    let minor = rename_apart(minor, &major.vars());
    let mut used = major.vars();
    used.extend(minor.vars());
    let next = used.iter().map(|v| v.0 + 1).max().unwrap_or(0);
    let (x, y) = (Formula::Var(Var(next)), Formula::Var(Var(next + 1)));
    let s1 = unify(&Formula::imp(x.clone(), y.clone()), &major).map_err(|_| ReplayError::StepFails)?;
    let s2 = unify(&s1.apply(&x), &s1.apply(&minor)).map_err(|_| ReplayError::StepFails)?;
    Ok(s2.apply(&s1.apply(&y)))
}

/// Does replaying `d` derive a clause that instantiates to `goal`?
pub fn check(d: &DTerm, axioms: &AxiomBase, goal: &Formula) -> bool {
    match replay(d, axioms) {
        Ok(derived) => match_formula(&derived, goal).is_ok(),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dterm::parse_dnotation;
    use crate::formula::parse_polish;

    #[test]
    fn replay_agrees_with_mgt_on_small_terms() {
        let base = AxiomBase::from_polish(&["CpCqp", "CCpCqrCCpqCpr"]).unwrap();
        for s in ["1", "D11", "DD111", "D1D11", "DD2D2D11D11", "D2D11", "DD2D11D11"] {
            let d = parse_dnotation(s).unwrap();
            let kernel = replay(&d, &base);
            let fast = crate::mgt::mgt(&d, &base).map(|m| m.conclusion);
            match (kernel, fast) {
                (Ok(a), Ok(b)) => assert_eq!(a, b, "{s}"),
                (Err(_), Err(_)) => {}
                (a, b) => panic!("{s}: kernel {a:?} vs mgt {b:?}"),
            }
        }
    }

    #[test]
    fn identity_from_s_and_k() {
        let base = AxiomBase::from_polish(&["CpCqp", "CCpCqrCCpqCpr"]).unwrap();
        let d = parse_dnotation("DD211").unwrap();
        let id = parse_polish("Cpp", base.symbols()).unwrap();
        assert!(replay(&d, &base).unwrap().subsumes(&id));
    }
}
