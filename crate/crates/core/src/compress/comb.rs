//! D-terms with combinator leaves.
//!
//! Rewrite rules, reading `D(f, x)` as application of `f` to `x`:
//!
//! ```text
//! D(D(I',x),y)          -> D(y,x)
//! D(D(D(B,x),y),z)      -> D(x,D(y,z))
//! D(D(D(D(B4,x),y),z),u) -> D(x,D(y,D(z,u)))
//! ```
//!
//! and generally `Bn` takes `n` arguments and nests them to the right.
//! `B` is `B3`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::grammar::{GTree, Grammar, GrammarError, Symbol};
use crate::dterm::{AxiomId, DTerm, Dimensions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Leaf {
    Axiom(AxiomId),
    N,
    /// `I'`, the argument swapper.
    Swap,
    /// `Bn` for n ≥ 2.
    B(u32),
}

impl Leaf {
    fn arity(self) -> Option<usize> {
        match self {
            Leaf::Swap => Some(2),
            Leaf::B(n) => Some(n as usize),
            Leaf::Axiom(_) | Leaf::N => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CombTerm {
    Leaf(Leaf),
    D(Arc<CombTerm>, Arc<CombTerm>),
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CombError {
    #[error("reduction exceeded {0} steps")]
    StepCapExceeded(usize),
    #[error("combinator {0} is applied to too few arguments")]
    StuckTerm(String),
    #[error("production `{0}` cannot be converted to combinators")]
    Unconvertible(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("bad combinator term at position {0}")]
    Parse(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Head redex first, then arguments left to right.
    LeftmostOutermost,
    /// Arguments first.
    Innermost,
}

pub const DEFAULT_STEP_CAP: usize = 1_000_000;

impl CombTerm {
    pub fn leaf(l: Leaf) -> Arc<CombTerm> {
        Arc::new(CombTerm::Leaf(l))
    }

    pub fn d(a: Arc<CombTerm>, b: Arc<CombTerm>) -> Arc<CombTerm> {
        Arc::new(CombTerm::D(a, b))
    }

    pub fn from_dterm(d: &DTerm) -> Arc<CombTerm> {
        match d {
            DTerm::Axiom(a) => CombTerm::leaf(Leaf::Axiom(*a)),
            DTerm::N => CombTerm::leaf(Leaf::N),
            DTerm::D(a, b) => CombTerm::d(CombTerm::from_dterm(a), CombTerm::from_dterm(b)),
        }
    }

    pub fn has_combinators(&self) -> bool {
        match self {
            CombTerm::Leaf(l) => l.arity().is_some(),
            CombTerm::D(a, b) => a.has_combinators() || b.has_combinators(),
        }
    }

    /// ⟨distinct inner nodes, inner node occurrences, height⟩, treating
    /// combinators as leaves.
    pub fn dims(&self) -> Dimensions {
        fn walk<'a>(
            t: &'a CombTerm,
            inner: &mut HashSet<&'a CombTerm>,
            memo: &mut HashMap<*const CombTerm, (usize, usize)>,
        ) -> (usize, usize) {
            let key = t as *const CombTerm;
            if let Some(&r) = memo.get(&key) {
                return r;
            }
            let r = match t {
                CombTerm::Leaf(_) => (0, 0),
                CombTerm::D(a, b) => {
                    inner.insert(t);
                    let (ta, ha) = walk(a, inner, memo);
                    let (tb, hb) = walk(b, inner, memo);
                    (ta + tb + 1, ha.max(hb) + 1)
                }
            };
            memo.insert(key, r);
            r
        }
        let mut inner = HashSet::new();
        let (tree, height) = walk(self, &mut inner, &mut HashMap::new());
        Dimensions::new(inner.len(), tree, height)
    }

    pub fn parse(text: &str) -> Result<Arc<CombTerm>, CombError> {
        let s = text.as_bytes();
        let mut pos = 0;
        let t = parse_term(s, &mut pos)?;
        skip_ws(s, &mut pos);
        if pos != s.len() {
            return Err(CombError::Parse(pos));
        }
        Ok(t)
    }
}

fn skip_ws(s: &[u8], pos: &mut usize) {
    while *pos < s.len() && s[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_term(s: &[u8], pos: &mut usize) -> Result<Arc<CombTerm>, CombError> {
    skip_ws(s, pos);
    let start = *pos;
    while *pos < s.len() && (s[*pos].is_ascii_alphanumeric() || s[*pos] == b'\'') {
        *pos += 1;
    }
    let word = std::str::from_utf8(&s[start..*pos]).map_err(|_| CombError::Parse(start))?;
    let leaf = match word {
        "D" => {
            let mut kids = Vec::new();
            skip_ws(s, pos);
            if s.get(*pos) != Some(&b'(') {
                return Err(CombError::Parse(*pos));
            }
            *pos += 1;
            kids.push(parse_term(s, pos)?);
            skip_ws(s, pos);
            if s.get(*pos) != Some(&b',') {
                return Err(CombError::Parse(*pos));
            }
            *pos += 1;
            kids.push(parse_term(s, pos)?);
            skip_ws(s, pos);
            if s.get(*pos) != Some(&b')') {
                return Err(CombError::Parse(*pos));
            }
            *pos += 1;
            let b = kids.pop().expect("two children");
            let a = kids.pop().expect("two children");
            return Ok(CombTerm::d(a, b));
        }
        "n" => Leaf::N,
        "I'" => Leaf::Swap,
        "B" => Leaf::B(3),
        w if w.starts_with('B') => match w[1..].parse::<u32>() {
            Ok(n) if n >= 2 => Leaf::B(n),
            _ => return Err(CombError::Parse(start)),
        },
        w => match w.parse::<u32>() {
            Ok(id) => Leaf::Axiom(AxiomId(id)),
            Err(_) => return Err(CombError::Parse(start)),
        },
    };
    Ok(CombTerm::leaf(leaf))
}

impl fmt::Display for Leaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Leaf::Axiom(a) => write!(f, "{a}"),
            Leaf::N => f.write_str("n"),
            Leaf::Swap => f.write_str("I'"),
            Leaf::B(3) => f.write_str("B"),
            Leaf::B(n) => write!(f, "B{n}"),
        }
    }
}

impl fmt::Display for CombTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CombTerm::Leaf(l) => write!(f, "{l}"),
            CombTerm::D(a, b) => write!(f, "D({a},{b})"),
        }
    }
}

/// Unwinds the left spine: `D(D(h,a1),a2)` gives `(h, [a1, a2])`.
fn spine(t: &Arc<CombTerm>) -> (Leaf, Vec<Arc<CombTerm>>) {
    let mut args = Vec::new();
    let mut cur = t;
    loop {
        match &**cur {
            CombTerm::D(f, x) => {
                args.push(x.clone());
                cur = f;
            }
            CombTerm::Leaf(l) => {
                args.reverse();
                return (*l, args);
            }
        }
    }
}

fn apply_all(head: Arc<CombTerm>, args: impl IntoIterator<Item = Arc<CombTerm>>) -> Arc<CombTerm> {
    args.into_iter().fold(head, CombTerm::d)
}

/// Contracts the head redex `head a1 .. am` (m = arity of `head`).
fn contract(head: Leaf, args: &[Arc<CombTerm>]) -> Arc<CombTerm> {
    match head {
        Leaf::Swap => CombTerm::d(args[1].clone(), args[0].clone()),
        Leaf::B(_) => {
            let mut it = args.iter().rev();
            let last = it.next().expect("at least two arguments").clone();
            it.fold(last, |acc, x| CombTerm::d(x.clone(), acc))
        }
        Leaf::Axiom(_) | Leaf::N => unreachable!("not a combinator"),
    }
}

struct Reducer {
    steps: usize,
    cap: usize,
    strategy: Strategy,
}

impl Reducer {
    fn tick(&mut self) -> Result<(), CombError> {
        self.steps += 1;
        if self.steps > self.cap {
            Err(CombError::StepCapExceeded(self.cap))
        } else {
            Ok(())
        }
    }

    /// Normal form as a combinator term; partial applications of
    /// combinators may remain.
    fn nf(&mut self, t: &Arc<CombTerm>) -> Result<Arc<CombTerm>, CombError> {
        let mut cur = t.clone();
        loop {
            let (head, mut args) = spine(&cur);
            if self.strategy == Strategy::Innermost {
                for a in args.iter_mut() {
                    *a = self.nf(a)?;
                }
            }
            match head.arity() {
                Some(m) if args.len() >= m => {
                    self.tick()?;
                    let rest = args.split_off(m);
                    cur = apply_all(contract(head, &args), rest);
                }
                _ => {
                    if self.strategy == Strategy::LeftmostOutermost {
                        for a in args.iter_mut() {
                            *a = self.nf(a)?;
                        }
                    }
                    return Ok(apply_all(CombTerm::leaf(head), args));
                }
            }
        }
    }
}

fn to_dterm(t: &CombTerm) -> Result<DTerm, CombError> {
    match t {
        CombTerm::Leaf(Leaf::Axiom(a)) => Ok(DTerm::Axiom(*a)),
        CombTerm::Leaf(Leaf::N) => Ok(DTerm::N),
        CombTerm::Leaf(l) => Err(CombError::StuckTerm(l.to_string())),
        CombTerm::D(a, b) => Ok(DTerm::d(to_dterm(a)?, to_dterm(b)?)),
    }
}

/// Reduces `t` to its combinator-free normal form, leftmost-outermost.
pub fn reduce(t: &Arc<CombTerm>, step_cap: usize) -> Result<(DTerm, usize), CombError> {
    reduce_with(t, Strategy::LeftmostOutermost, step_cap)
}

pub fn reduce_with(t: &Arc<CombTerm>, strategy: Strategy, step_cap: usize) -> Result<(DTerm, usize), CombError> {
    let mut r = Reducer { steps: 0, cap: step_cap, strategy };
    let n = r.nf(t)?;
    Ok((to_dterm(&n)?, r.steps))
}

/// Converts a grammar whose parameterized productions each use a single
/// parameter exactly once. Calls `A(e)` become `D(T_A, e)` where `T_A` is
/// built by bracket abstraction; parameterless nonterminals become shared
/// subterms.
pub fn to_combinators(g: &Grammar) -> Result<Arc<CombTerm>, CombError> {
    let order = g.validate()?;
    let mut conv = Converter { g, done: vec![None; g.productions.len()] };
    for i in order {
        let c = conv.production(i)?;
        conv.done[i] = Some(c);
    }
    match conv.done[g.start].clone() {
        Some(Conv::Term(t)) => Ok(t),
        _ => Err(CombError::Unconvertible(g.start().name.clone())),
    }
}

#[derive(Clone, Debug)]
enum Conv {
    /// Parameterless nonterminal.
    Term(Arc<CombTerm>),
    /// `A(v) -> v`.
    Identity,
    /// `D(f, e)` reduces to the right-hand side with `e` for the parameter.
    Function(Arc<CombTerm>),
}

struct Converter<'a> {
    g: &'a Grammar,
    done: Vec<Option<Conv>>,
}

impl Converter<'_> {
    fn production(&self, i: usize) -> Result<Conv, CombError> {
        let p = &self.g.productions[i];
        let unconvertible = || CombError::Unconvertible(p.name.clone());
        match p.params.len() {
            0 => Ok(Conv::Term(self.closed(&p.rhs)?)),
            1 => {
                let mut uses = 0;
                count_param(&p.rhs, &mut uses);
                if uses != 1 {
                    return Err(unconvertible());
                }
                // Walk from the root to the parameter, collecting the
                // functions applied along the way (outermost first).
                let mut chain: Vec<Arc<CombTerm>> = Vec::new();
                let mut cur = &p.rhs;
                loop {
                    match cur {
                        GTree::Param(_) => break,
                        GTree::Node(Symbol::D, kids) => {
                            if has_param(&kids[1]) {
                                chain.push(self.closed(&kids[0])?);
                                cur = &kids[1];
                            } else {
                                let swap = CombTerm::d(CombTerm::leaf(Leaf::Swap), self.closed(&kids[1])?);
                                chain.push(swap);
                                cur = &kids[0];
                            }
                        }
                        GTree::Node(Symbol::Nt(j), kids) if kids.len() == 1 => {
                            match self.done[*j].clone() {
                                Some(Conv::Function(f)) => chain.push(f),
                                Some(Conv::Identity) => {}
                                _ => return Err(unconvertible()),
                            }
                            cur = &kids[0];
                        }
                        GTree::Node(..) => return Err(unconvertible()),
                    }
                }
                Ok(match chain.len() {
                    0 => Conv::Identity,
                    1 => Conv::Function(chain.pop().expect("one element")),
                    k => {
                        let b = CombTerm::leaf(Leaf::B(k as u32 + 1));
                        Conv::Function(apply_all(b, chain))
                    }
                })
            }
            _ => Err(unconvertible()),
        }
    }

    fn closed(&self, t: &GTree) -> Result<Arc<CombTerm>, CombError> {
        match t {
            GTree::Param(_) => Err(CombError::Unconvertible("parameter outside its production".into())),
            GTree::Node(Symbol::D, kids) => Ok(CombTerm::d(self.closed(&kids[0])?, self.closed(&kids[1])?)),
            GTree::Node(Symbol::Axiom(a), _) => Ok(CombTerm::leaf(Leaf::Axiom(*a))),
            GTree::Node(Symbol::N, _) => Ok(CombTerm::leaf(Leaf::N)),
            GTree::Node(Symbol::Nt(j), kids) => {
                let name = || CombError::Unconvertible(self.g.productions[*j].name.clone());
                match (self.done[*j].clone().ok_or_else(name)?, kids.as_slice()) {
                    (Conv::Term(t), []) => Ok(t),
                    (Conv::Function(f), [arg]) => Ok(CombTerm::d(f, self.closed(arg)?)),
                    (Conv::Identity, [arg]) => self.closed(arg),
                    _ => Err(name()),
                }
            }
        }
    }
}

fn count_param(t: &GTree, n: &mut usize) {
    match t {
        GTree::Param(_) => *n += 1,
        GTree::Node(_, kids) => kids.iter().for_each(|k| count_param(k, n)),
    }
}

fn has_param(t: &GTree) -> bool {
    let mut n = 0;
    count_param(t, &mut n);
    n > 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dterm::parse_dnotation;

    fn c(s: &str) -> Arc<CombTerm> {
        CombTerm::parse(s).unwrap()
    }

    fn dt(s: &str) -> DTerm {
        parse_dnotation(s).unwrap()
    }

    #[test]
    fn rule_instances() {
        assert_eq!(reduce(&c("D(D(I',1),D(1,1))"), 10).unwrap(), (dt("DD111"), 1));
        assert_eq!(reduce(&c("D(D(D(B,1),1),1)"), 10).unwrap(), (dt("D1D11"), 1));
        assert_eq!(reduce(&c("D(D(D(D(B4,1),2),3),4)"), 10).unwrap(), (dt("D1D2D34"), 1));
        assert_eq!(reduce(&c("D(D(1,1),n)"), 10).unwrap(), (dt("DD11n"), 0));
    }

    #[test]
    fn errors() {
        assert!(matches!(reduce(&c("D(B,1)"), 10), Err(CombError::StuckTerm(_))));
        assert!(matches!(reduce(&c("D(D(D(B,1),1),1)"), 0), Err(CombError::StepCapExceeded(0))));
        assert!(CombTerm::parse("D(1,").is_err());
    }

    #[test]
    fn print_parse() {
        for s in ["D(D(I',1),D(1,1))", "D(D(D(B,1),2),n)", "D(B7,1)"] {
            assert_eq!(c(s).to_string(), s);
        }
    }

    #[test]
    fn simple_conversions() {
        let g = Grammar::parse("Start -> D(1,1)").unwrap();
        let t = to_combinators(&g).unwrap();
        assert!(!t.has_combinators());
        let g = Grammar::parse("A(v) -> D(v,1)\nStart -> A(1)").unwrap();
        let t = to_combinators(&g).unwrap();
        assert_eq!(t.to_string(), "D(D(I',1),1)");
        assert_eq!(reduce(&t, 10).unwrap().0, dt("D11"));
        let g = Grammar::parse("A(v,w) -> D(v,w)\nStart -> A(1,1)").unwrap();
        assert!(matches!(to_combinators(&g), Err(CombError::Unconvertible(_))));
    }

    #[test]
    fn strategies_agree() {
        let g = Grammar::parse(
            "A(v) -> D(v,1)\nB(v) -> D(1,D(2,v))\nC(v) -> A(B(A(v)))\nStart -> C(D(C(1),C(2)))",
        )
        .unwrap();
        let t = to_combinators(&g).unwrap();
        let (lo, _) = reduce_with(&t, Strategy::LeftmostOutermost, 1000).unwrap();
        let (inner, _) = reduce_with(&t, Strategy::Innermost, 1000).unwrap();
        assert_eq!(lo, g.expand().unwrap());
        assert_eq!(inner, lo);
    }
}
