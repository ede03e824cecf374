//! Reading problems and proofs.

use std::collections::HashMap;
use std::io::Read as _;
use std::path::Path;
use std::sync::Arc;

use cdtools::compress::Grammar;
use cdtools::dterm::{parse_dnotation, AxiomId, DTerm};
use cdtools::formula::{parse_goal, Formula};
use cdtools::mgt::AxiomBase;
use cdtools::problem::{read_cd_problem, read_meredith};

use crate::CliError;

pub fn read_file(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub struct Problem {
    pub name: String,
    pub axioms: AxiomBase,
    pub goals: Vec<Formula>,
}

/// A problem from a TPTP file, or from Polish axioms and goals.
pub fn load_problem(file: Option<&Path>, axioms: &[String], goals: &[String]) -> Result<Problem, CliError> {
    match (file, axioms.is_empty()) {
        (Some(_), false) => Err(CliError::Input("give either a problem file or --axioms, not both".into())),
        (Some(path), true) => {
            let text = read_file(path)?;
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let p = read_cd_problem(&text, &name).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let mut axioms = p.axioms;
            let mut goal_list = vec![p.goal];
            for g in goals {
                goal_list.push(parse_goal(g, axioms.symbols_mut()).map_err(|e| CliError::Input(format!("goal `{g}`: {e}")))?);
            }
            Ok(Problem { name: p.name, axioms, goals: goal_list })
        }
        (None, true) => Err(CliError::Input("no problem given (use a problem file or --axioms)".into())),
        (None, false) => {
            let texts: Vec<&str> = axioms.iter().map(String::as_str).collect();
            let mut base = AxiomBase::from_polish(&texts).map_err(|e| CliError::Input(format!("axioms: {e}")))?;
            let mut goal_list = Vec::new();
            for g in goals {
                goal_list.push(parse_goal(g, base.symbols_mut()).map_err(|e| CliError::Input(format!("goal `{g}`: {e}")))?);
            }
            Ok(Problem { name: "cli".into(), axioms: base, goals: goal_list })
        }
    }
}

/// Proofs read from a file, with the axioms the file itself states.
pub struct Proofs {
    pub axioms: Option<AxiomBase>,
    pub terms: Vec<DTerm>,
    pub grammar: Option<Grammar>,
}

fn looks_like_meredith(text: &str) -> bool {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with('%'));
    first.is_some_and(|l| {
        let l = l.trim_start_matches('*').trim_start();
        let digits = l.chars().take_while(char::is_ascii_digit).count();
        digits > 0 && l[digits..].starts_with('.')
    })
}

/// Reads a Meredith step list (its goal steps, or its last step when none
/// is marked), a tree grammar, or one D-term per line.
pub fn load_proofs(path: &Path) -> Result<Proofs, CliError> {
    let text = read_file(path)?;
    let at = |e: &dyn std::fmt::Display| CliError::Input(format!("{}: {e}", path.display()));
    if looks_like_meredith(&text) {
        let p = read_meredith(&text).map_err(|e| at(&e))?;
        let mut terms: Vec<DTerm> = p.goals().filter_map(|s| s.proof.clone()).collect();
        if terms.is_empty() {
            terms.extend(p.derived().last().and_then(|s| s.proof.clone()));
        }
        if terms.is_empty() {
            return Err(at(&"no derived steps"));
        }
        return Ok(Proofs { axioms: Some(p.axioms), terms, grammar: None });
    }
    if text.contains("->") {
        let g = Grammar::parse(&text).map_err(|e| at(&e))?;
        let d = g.expand().map_err(|e| at(&e))?;
        return Ok(Proofs { axioms: None, terms: vec![d], grammar: Some(g) });
    }
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        terms.push(parse_dnotation(line).map_err(|e| at(&format!("line {}: {e}", i + 1)))?);
    }
    if terms.is_empty() {
        return Err(at(&"no proofs"));
    }
    Ok(Proofs { axioms: None, terms, grammar: None })
}

/// Renames axiom leaves of `d` through `map`.
pub fn relabel(d: &DTerm, map: &HashMap<AxiomId, AxiomId>) -> Result<DTerm, AxiomId> {
    Ok(match d {
        DTerm::Axiom(a) => DTerm::Axiom(*map.get(a).ok_or(*a)?),
        DTerm::N => DTerm::N,
        DTerm::D(x, y) => DTerm::D(Arc::new(relabel(x, map)?), Arc::new(relabel(y, map)?)),
    })
}

/// Maps each axiom of `from` to an axiom of `to` stating the same formula
/// up to variable renaming.
pub fn align(from: &AxiomBase, to: &AxiomBase) -> HashMap<AxiomId, AxiomId> {
    from.iter()
        .filter_map(|(id, f)| to.iter().find(|(_, g)| g.is_variant_of(f)).map(|(j, _)| (id, j)))
        .collect()
}
