//! Meredith-style step lists.
//!
//! ```text
//! 1. CCCpqrCCrpCsp
//! 2. CCCCpqCrqCqsCtCqs = D11
//! *9. CpCqp = DD26n
//! ```
//!
//! Lines without `=` are axioms, numbered by their step number. Digits in
//! a D-expression refer to earlier steps; `[12]` refers to step 12. A
//! leading `*` marks a goal.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::dterm::{parse_dnotation_with, AxiomId, DNotationError, DTerm, DTermDag, DagNode};
use crate::formula::{parse_polish, Formula, PolishError, SymbolTable};
use crate::mgt::{mgt, AxiomBase};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeredithStep {
    pub number: u32,
    /// The formula as written.
    pub formula: Formula,
    /// Resolved proof with axiom leaves; `None` for axiom lines.
    pub proof: Option<DTerm>,
    pub goal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeredithProof {
    pub axioms: AxiomBase,
    pub steps: Vec<MeredithStep>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MeredithError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: PolishError },
    #[error("line {line}: {source}")]
    Expression { line: usize, source: DNotationError },
    #[error("step {step} is defined twice")]
    Duplicate { step: u32 },
    #[error("step {step} refers to later step {reference}")]
    ForwardReference { step: u32, reference: u32 },
    #[error("step {step} refers to undefined step {reference}")]
    UnknownReference { step: u32, reference: u32 },
    #[error("step {step} has no most general theorem")]
    NoMgt { step: u32 },
    #[error("step {step}: stated {stated} but the proof yields {computed}")]
    Mismatch { step: u32, stated: String, computed: String },
}

impl MeredithProof {
    pub fn step(&self, number: u32) -> Option<&MeredithStep> {
        self.steps.iter().find(|s| s.number == number)
    }

    /// Derived steps, in file order.
    pub fn derived(&self) -> impl Iterator<Item = &MeredithStep> {
        self.steps.iter().filter(|s| s.proof.is_some())
    }

    pub fn goals(&self) -> impl Iterator<Item = &MeredithStep> {
        self.steps.iter().filter(|s| s.goal)
    }
}

struct Line<'a> {
    no: usize,
    number: u32,
    goal: bool,
    formula: &'a str,
    expr: Option<&'a str>,
}

fn split_line(no: usize, line: &str) -> Result<Line<'_>, MeredithError> {
    let syntax = |msg: &str| MeredithError::Syntax { line: no, msg: msg.into() };
    let (goal, rest) = match line.strip_prefix('*') {
        Some(r) => (true, r.trim_start()),
        None => (false, line),
    };
    let (num, rest) = rest.split_once('.').ok_or_else(|| syntax("expected `<number>.`"))?;
    let number: u32 = num.trim().parse().map_err(|_| syntax("bad step number"))?;
    let (formula, expr) = match rest.split_once('=') {
        Some((f, e)) => (f.trim(), Some(e.trim())),
        None => (rest.trim(), None),
    };
    if formula.is_empty() {
        return Err(syntax("missing formula"));
    }
    Ok(Line { no, number, goal, formula, expr })
}

pub fn read_meredith(text: &str) -> Result<MeredithProof, MeredithError> {
    read_meredith_with(text, SymbolTable::standard())
}

/// Reads a step list and checks each derived step's formula against the
/// MGT of its proof (`n` left unconstrained), up to variable renaming.
pub fn read_meredith_with(text: &str, symbols: SymbolTable) -> Result<MeredithProof, MeredithError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        lines.push(split_line(i + 1, line)?);
    }
    let all_numbers: Vec<u32> = lines.iter().map(|l| l.number).collect();

    let mut axioms = AxiomBase::new(symbols);
    let mut resolved: HashMap<u32, DTerm> = HashMap::new();
    let mut steps = Vec::new();
    for l in &lines {
        if resolved.contains_key(&l.number) {
            return Err(MeredithError::Duplicate { step: l.number });
        }
        let formula = parse_polish(l.formula, axioms.symbols())
            .map_err(|source| MeredithError::Formula { line: l.no, source })?;
        let proof = match l.expr {
            None => {
                axioms.insert(AxiomId(l.number), formula.clone());
                resolved.insert(l.number, DTerm::Axiom(AxiomId(l.number)));
                None
            }
            Some(expr) => {
                let mut missing = None;
                let d = parse_dnotation_with(expr, &mut |id| {
                    let r = resolved.get(&id).cloned();
                    if r.is_none() {
                        missing = Some(id);
                    }
                    r
                });
                let d = match (d, missing) {
                    (Ok(d), _) => d,
                    (Err(_), Some(reference)) if all_numbers.contains(&reference) => {
                        return Err(MeredithError::ForwardReference { step: l.number, reference })
                    }
                    (Err(_), Some(reference)) => {
                        return Err(MeredithError::UnknownReference { step: l.number, reference })
                    }
                    (Err(source), None) => return Err(MeredithError::Expression { line: l.no, source }),
                };
                let computed = mgt(&d, &axioms).map_err(|_| MeredithError::NoMgt { step: l.number })?.conclusion;
                if computed != formula.normalized() {
                    return Err(MeredithError::Mismatch {
                        step: l.number,
                        stated: axioms.polish(&formula),
                        computed: axioms.polish(&computed),
                    });
                }
                resolved.insert(l.number, d.clone());
                Some(d)
            }
        };
        steps.push(MeredithStep { number: l.number, formula, proof, goal: l.goal });
    }
    Ok(MeredithProof { axioms, steps })
}

fn reference(n: u32) -> String {
    if n < 10 {
        n.to_string()
    } else {
        format!("[{n}]")
    }
}

/// Writes `proofs` as a step list: axioms first, then derived steps in
/// dependency order. A subproof gets its own step when it is one of
/// `proofs` or is used more than once, so the number of written `D`s is
/// the compacted size. Every step of `proofs` is marked as a goal.
pub fn print_meredith(axioms: &AxiomBase, proofs: &[DTerm]) -> String {
    let dag = DTermDag::compact(proofs);
    let mut uses = vec![0usize; dag.len()];
    for id in 0..dag.len() {
        if let DagNode::D(a, b) = dag.node(id) {
            uses[a] += 1;
            uses[b] += 1;
        }
    }
    let roots: Vec<usize> = dag.roots().to_vec();
    let mut out = String::new();
    for (id, f) in axioms.iter() {
        let _ = writeln!(out, "{}. {}", id.0, axioms.polish(f));
    }
    let mut next = axioms.ids().map(|a| a.0).max().unwrap_or(0) + 1;
    let mut step_of: BTreeMap<usize, u32> = BTreeMap::new();
    let terms = dag.expand_all();
    for id in 0..dag.len() {
        let is_root = roots.contains(&id);
        if !matches!(dag.node(id), DagNode::D(..)) || !(is_root || uses[id] > 1) {
            continue;
        }
        let mut expr = String::new();
        write_expr(&dag, id, true, &step_of, &mut expr);
        let formula = match mgt(&terms[id], axioms) {
            Ok(m) => axioms.polish(&m.conclusion),
            Err(_) => "?".to_string(),
        };
        let star = if is_root { "*" } else { "" };
        let _ = writeln!(out, "{star}{next}. {formula} = {expr}");
        step_of.insert(id, next);
        next += 1;
    }
    out
}

fn write_expr(dag: &DTermDag, id: usize, top: bool, step_of: &BTreeMap<usize, u32>, out: &mut String) {
    if !top {
        if let Some(&s) = step_of.get(&id) {
            out.push_str(&reference(s));
            return;
        }
    }
    match dag.node(id) {
        DagNode::Axiom(a) => out.push_str(&reference(a.0)),
        DagNode::N => out.push('n'),
        DagNode::D(a, b) => {
            out.push('D');
            write_expr(dag, a, false, step_of, out);
            write_expr(dag, b, false, step_of, out);
        }
    }
}
