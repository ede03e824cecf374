//! Reader for the clause-form subset of TPTP that CD problems use, and
//! detection of the CD shape.
//!
//! ```text
//! cnf(det, axiom, ~p(i(X,Y)) | ~p(X) | p(Y)).
//! cnf(k, axiom, p(i(X,i(Y,X)))).
//! cnf(goal, negated_conjecture, ~p(i(a,i(b,a)))).
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::dterm::AxiomId;
use crate::formula::{print_polish, Formula, Sym, SymbolTable, Var};
use crate::mgt::AxiomBase;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Literal {
    pub positive: bool,
    pub predicate: String,
    pub args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub name: String,
    pub role: String,
    pub literals: Vec<Literal>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotCdReason {
    /// The detachment clause encodes implication with disjunction and
    /// negation.
    DisjunctionDetachment,
    /// No clause has the detachment shape.
    NoDetachment,
    MultipleNonUnit,
    NonHorn,
    NonAtomicGoal,
    NonGroundGoal,
    NoGoal,
    MultipleGoals,
    MultiplePredicates,
    NonUnaryPredicate,
    NoAxioms,
}

impl std::fmt::Display for NotCdReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NotCdReason::DisjunctionDetachment => "detachment-form",
            NotCdReason::NoDetachment => "no-detachment",
            NotCdReason::MultipleNonUnit => "multiple-non-unit",
            NotCdReason::NonHorn => "non-horn",
            NotCdReason::NonAtomicGoal => "non-atomic-goal",
            NotCdReason::NonGroundGoal => "non-ground-goal",
            NotCdReason::NoGoal => "no-goal",
            NotCdReason::MultipleGoals => "multiple-goals",
            NotCdReason::MultiplePredicates => "multiple-predicates",
            NotCdReason::NonUnaryPredicate => "non-unary-predicate",
            NotCdReason::NoAxioms => "no-axioms",
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ReadError {
    #[error("line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("not a CD problem: {0}")]
    NotCd(NotCdReason),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CdProblem {
    pub name: String,
    pub axioms: AxiomBase,
    pub goal: Formula,
    /// Original predicate name.
    pub predicate: String,
    /// Original name of the implication symbol.
    pub implication: String,
}

impl CdProblem {
    /// Canonical clause text: predicate `P`, implication `imp`.
    pub fn to_tptp(&self) -> String {
        let syms = self.axioms.symbols();
        let mut out = String::new();
        let _ = writeln!(out, "% {}", self.name);
        let _ = writeln!(out, "cnf(det, axiom, ~P(imp(X,Y)) | ~P(X) | P(Y)).");
        for (id, f) in self.axioms.iter() {
            let _ = writeln!(out, "cnf(axiom_{id}, axiom, P({})).", tptp_term(f, syms));
        }
        let _ = writeln!(out, "cnf(goal, negated_conjecture, ~P({})).", tptp_term(&self.goal, syms));
        out
    }

    pub fn goal_polish(&self) -> String {
        print_polish(&self.goal, self.axioms.symbols())
    }
}

fn tptp_term(f: &Formula, syms: &SymbolTable) -> String {
    match f {
        Formula::Var(v) => format!("X{}", v.0),
        Formula::App(s, args) if args.is_empty() => syms.name(*s).to_string(),
        Formula::App(s, args) => {
            let inner: Vec<String> = args.iter().map(|a| tptp_term(a, syms)).collect();
            format!("{}({})", syms.name(*s), inner.join(","))
        }
    }
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn error(&self, msg: impl Into<String>) -> ReadError {
        let before = &self.s[..self.pos.min(self.s.len())];
        let line = before.iter().filter(|&&c| c == b'\n').count() + 1;
        let column = before.iter().rev().take_while(|&&c| c != b'\n').count() + 1;
        ReadError::Parse { line, column, msg: msg.into() }
    }

    fn skip(&mut self) {
        loop {
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.s.get(self.pos) == Some(&b'%') {
                while self.pos < self.s.len() && self.s[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if self.s[self.pos..].starts_with(b"/*") {
                match self.s[self.pos + 2..].windows(2).position(|w| w == b"*/") {
                    Some(i) => self.pos += i + 4,
                    None => self.pos = self.s.len(),
                }
            } else {
                return;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip();
        self.pos >= self.s.len()
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ReadError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<&'a str, ReadError> {
        self.skip();
        let start = self.pos;
        if self.s.get(self.pos) == Some(&b'\'') {
            let end = self.s[start + 1..]
                .iter()
                .position(|&c| c == b'\'')
                .ok_or_else(|| self.error("unterminated quoted name"))?;
            self.pos = start + end + 2;
            return Ok(std::str::from_utf8(&self.s[start + 1..start + 1 + end]).unwrap_or(""));
        }
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a name"));
        }
        Ok(std::str::from_utf8(&self.s[start..self.pos]).unwrap_or(""))
    }

    fn args(&mut self) -> Result<Vec<Term>, ReadError> {
        let mut args = Vec::new();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected `,` or `)`")),
                }
            }
        }
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, ReadError> {
        let name = self.ident()?.to_string();
        if name.starts_with(|c: char| c.is_ascii_uppercase() || c == '_') {
            return Ok(Term::Var(name));
        }
        Ok(Term::App(name, self.args()?))
    }

    fn literal(&mut self) -> Result<Literal, ReadError> {
        let positive = if self.peek() == Some(b'~') {
            self.pos += 1;
            false
        } else {
            true
        };
        // Predicate names may start with an uppercase letter.
        let predicate = self.ident()?.to_string();
        Ok(Literal { positive, predicate, args: self.args()? })
    }

    fn clause(&mut self) -> Result<Vec<Literal>, ReadError> {
        let paren = self.peek() == Some(b'(');
        if paren {
            self.pos += 1;
        }
        let mut lits = vec![self.literal()?];
        while self.peek() == Some(b'|') {
            self.pos += 1;
            lits.push(self.literal()?);
        }
        if paren {
            self.expect(b')')?;
        }
        Ok(lits)
    }
}

/// Parses `cnf(...)` statements.
pub fn parse_cnf(text: &str) -> Result<Vec<Clause>, ReadError> {
    let mut lx = Lexer { s: text.as_bytes(), pos: 0 };
    let mut out = Vec::new();
    while !lx.at_end() {
        let kw = lx.ident()?;
        if kw != "cnf" {
            return Err(lx.error(format!("unsupported statement `{kw}`")));
        }
        lx.expect(b'(')?;
        let name = lx.ident()?.to_string();
        lx.expect(b',')?;
        let role = lx.ident()?.to_string();
        lx.expect(b',')?;
        let literals = lx.clause()?;
        lx.expect(b')')?;
        lx.expect(b'.')?;
        out.push(Clause { name, role, literals });
    }
    Ok(out)
}

fn vars_of(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Var(v) => {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        Term::App(_, args) => args.iter().for_each(|a| vars_of(a, out)),
    }
}

fn is_ground(t: &Term) -> bool {
    let mut v = Vec::new();
    vars_of(t, &mut v);
    v.is_empty()
}

/// The implication symbol if `c` is `P(y) ← P(f(x,y)) ∧ P(x)` up to literal
/// order and variable names.
fn det_symbol(c: &Clause) -> Result<String, NotCdReason> {
    let pos: Vec<&Literal> = c.literals.iter().filter(|l| l.positive).collect();
    let neg: Vec<&Literal> = c.literals.iter().filter(|l| !l.positive).collect();
    if pos.len() != 1 || neg.len() != 2 {
        return Err(NotCdReason::NoDetachment);
    }
    let Term::Var(y) = &pos[0].args[0] else { return Err(NotCdReason::NoDetachment) };
    for (major, minor) in [(neg[0], neg[1]), (neg[1], neg[0])] {
        let Term::Var(x) = &minor.args[0] else { continue };
        if x == y {
            continue;
        }
        if let Term::App(f, args) = &major.args[0] {
            match args.as_slice() {
                [Term::Var(a), Term::Var(b)] if a == x && b == y => return Ok(f.clone()),
                // or(not(x), y)
                [Term::App(_, inner), Term::Var(b)] if b == y && inner.as_slice() == [Term::Var(x.clone())] => {
                    return Err(NotCdReason::DisjunctionDetachment)
                }
                _ => {}
            }
        }
    }
    Err(NotCdReason::NoDetachment)
}

const NOT_ALIASES: &[&str] = &["not", "n", "neg"];

struct Canon<'a> {
    symbols: &'a mut SymbolTable,
    implication: &'a str,
}

impl Canon<'_> {
    fn formula(&mut self, t: &Term, vars: &[String]) -> Result<Formula, ReadError> {
        Ok(match t {
            Term::Var(v) => Formula::Var(Var(vars.iter().position(|w| w == v).expect("collected") as u32)),
            Term::App(f, args) => {
                let sym = if f == self.implication && args.len() == 2 {
                    Sym::IMP
                } else if args.len() == 1 && NOT_ALIASES.contains(&f.as_str()) {
                    Sym::NOT
                } else {
                    let name = if f == "imp" { "imp_" } else { f.as_str() };
                    self.symbols.intern(name, args.len()).map_err(|e| ReadError::Parse {
                        line: 0,
                        column: 0,
                        msg: e.to_string(),
                    })?
                };
                let args = args.iter().map(|a| self.formula(a, vars)).collect::<Result<Vec<_>, _>>()?;
                Formula::app(sym, args)
            }
        })
    }
}

/// Reads a CD problem from clause text, or says why the text is not one.
pub fn read_cd_problem(text: &str, name: &str) -> Result<CdProblem, ReadError> {
    let clauses = parse_cnf(text)?;
    let not_cd = |r| Err(ReadError::NotCd(r));

    let preds: BTreeSet<(&str, usize)> =
        clauses.iter().flat_map(|c| &c.literals).map(|l| (l.predicate.as_str(), l.args.len())).collect();
    let names: BTreeSet<&str> = preds.iter().map(|p| p.0).collect();
    if names.len() > 1 {
        return not_cd(NotCdReason::MultiplePredicates);
    }
    let Some(&(predicate, _)) = preds.first() else { return not_cd(NotCdReason::NoAxioms) };
    if preds.iter().any(|p| p.1 != 1) {
        return not_cd(NotCdReason::NonUnaryPredicate);
    }

    let mut goals = Vec::new();
    let mut units = Vec::new();
    let mut det = Vec::new();
    for c in &clauses {
        let npos = c.literals.iter().filter(|l| l.positive).count();
        match (npos, c.literals.len()) {
            (0, _) => goals.push(c),
            (1, 1) => units.push(c),
            (1, _) => det.push(c),
            _ => return not_cd(NotCdReason::NonHorn),
        }
    }
    match goals.as_slice() {
        [] => return not_cd(NotCdReason::NoGoal),
        [g] if g.literals.len() > 1 => return not_cd(NotCdReason::NonAtomicGoal),
        [g] if !is_ground(&g.literals[0].args[0]) => return not_cd(NotCdReason::NonGroundGoal),
        [_] => {}
        _ if goals.iter().any(|g| g.literals.len() > 1) => return not_cd(NotCdReason::NonAtomicGoal),
        _ => return not_cd(NotCdReason::MultipleGoals),
    }
    let implication = match det.as_slice() {
        [] => return not_cd(NotCdReason::NoDetachment),
        [c] => det_symbol(c).map_err(ReadError::NotCd)?,
        _ => return not_cd(NotCdReason::MultipleNonUnit),
    };
    if units.is_empty() {
        return not_cd(NotCdReason::NoAxioms);
    }

    let mut symbols = SymbolTable::standard();
    let mut canon = Canon { symbols: &mut symbols, implication: &implication };
    let mut formulas = Vec::new();
    for c in &units {
        let t = &c.literals[0].args[0];
        let mut vars = Vec::new();
        vars_of(t, &mut vars);
        formulas.push(canon.formula(t, &vars)?);
    }
    let goal = canon.formula(&goals[0].literals[0].args[0], &[])?;
    let mut axioms = AxiomBase::new(symbols);
    for (i, f) in formulas.into_iter().enumerate() {
        axioms.insert(AxiomId(i as u32 + 1), f);
    }
    Ok(CdProblem { name: name.to_string(), axioms, goal, predicate: predicate.to_string(), implication })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "
        % minimal CD problem
        cnf(det, axiom, ~p(i(X,Y)) | ~p(X) | p(Y)).
        cnf(k, axiom, p(i(X,i(Y,X)))).
        cnf(goal, negated_conjecture, ~p(i(a,i(b,a)))).
    ";

    #[test]
    fn accepts_minimal_problem() {
        let p = read_cd_problem(MINIMAL, "minimal").unwrap();
        assert_eq!(p.axioms.len(), 1);
        assert!(p.goal.is_ground());
        assert_eq!(p.axioms.polish(p.axioms.get(AxiomId(1)).unwrap()), "CpCqp");
        assert_eq!(p.goal_polish(), "CaCba");
        assert_eq!((p.predicate.as_str(), p.implication.as_str()), ("p", "i"));
    }

    #[test]
    fn canonical_form_is_stable() {
        let p = read_cd_problem(MINIMAL, "minimal").unwrap();
        let once = p.to_tptp();
        let q = read_cd_problem(&once, "minimal").unwrap();
        assert_eq!(q.to_tptp(), once);
        assert_eq!(q.goal_polish(), p.goal_polish());
    }

    #[test]
    fn literal_order_and_variable_names_do_not_matter() {
        let text = "cnf(g, negated_conjecture, ~p(i(a,i(b,a)))).
                    cnf(k, axiom, p(i(U,i(V,U)))).
                    cnf(det, axiom, p(B) | ~p(A) | ~p(i(A,B))).";
        let p = read_cd_problem(text, "x").unwrap();
        assert_eq!(p.to_tptp(), read_cd_problem(MINIMAL, "x").unwrap().to_tptp());
    }

    #[test]
    fn rejections() {
        let reason = |t: &str| match read_cd_problem(t, "x") {
            Err(ReadError::NotCd(r)) => r,
            other => panic!("{other:?}"),
        };
        assert_eq!(
            reason(
                "cnf(d, axiom, ~p(or(not(X),Y)) | ~p(X) | p(Y)).
                 cnf(a, axiom, p(or(not(X),X))). cnf(g, negated_conjecture, ~p(a))."
            ),
            NotCdReason::DisjunctionDetachment
        );
        assert_eq!(
            reason(
                "cnf(d, axiom, ~p(i(X,Y)) | ~p(X) | p(Y)).
                 cnf(a, axiom, p(i(X,X))). cnf(g, negated_conjecture, ~p(a) | ~p(b))."
            ),
            NotCdReason::NonAtomicGoal
        );
        assert_eq!(
            reason(
                "cnf(d, axiom, ~p(i(X,Y)) | ~p(X) | p(Y)). cnf(e, axiom, ~p(X) | p(n(n(X)))).
                 cnf(a, axiom, p(i(X,X))). cnf(g, negated_conjecture, ~p(a))."
            ),
            NotCdReason::MultipleNonUnit
        );
        assert_eq!(reason("cnf(a, axiom, p(X)). cnf(b, axiom, q(X)). cnf(g, negated_conjecture, ~p(a))."), NotCdReason::MultiplePredicates);
    }

    #[test]
    fn parse_errors_have_positions() {
        match read_cd_problem("cnf(a, axiom, p(X)\n", "x") {
            Err(ReadError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(read_cd_problem("fof(a, axiom, p).", "x"), Err(ReadError::Parse { .. })));
    }
}
