//! Straight-line tree grammars over D-terms.
//!
//! Text format, one production per line:
//!
//! ```text
//! A2(v) -> D(v,1)
//! A4(v) -> A3(A3(v))
//! Start -> A4(D(1,1))
//! ```
//!
//! Inner nodes are `D(major,minor)`, axioms are integers, `n` is the
//! marker, parameters are lowercase names and nonterminals are the other
//! identifiers. The start symbol is `Start`, or the last production if no
//! production has that name.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::dterm::{AxiomId, DTerm, DTermDag, DagNode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    D,
    Axiom(AxiomId),
    N,
    /// Index into [`Grammar::productions`].
    Nt(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GTree {
    Node(Symbol, Vec<GTree>),
    /// Index into the enclosing production's parameter list.
    Param(usize),
}

impl GTree {
    pub fn d(a: GTree, b: GTree) -> GTree {
        GTree::Node(Symbol::D, vec![a, b])
    }

    pub fn leaf(s: Symbol) -> GTree {
        GTree::Node(s, Vec::new())
    }

    /// Edges: every node except the root has one incoming edge.
    pub fn edges(&self) -> usize {
        self.node_count() - 1
    }

    pub fn node_count(&self) -> usize {
        match self {
            GTree::Param(_) => 1,
            GTree::Node(_, kids) => 1 + kids.iter().map(GTree::node_count).sum::<usize>(),
        }
    }

    fn visit_params(&self, f: &mut impl FnMut(usize)) {
        match self {
            GTree::Param(i) => f(*i),
            GTree::Node(_, kids) => kids.iter().for_each(|k| k.visit_params(f)),
        }
    }

    pub(crate) fn visit_calls(&self, f: &mut impl FnMut(usize)) {
        if let GTree::Node(s, kids) = self {
            if let Symbol::Nt(i) = s {
                f(*i);
            }
            kids.iter().for_each(|k| k.visit_calls(f));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Production {
    pub name: String,
    pub params: Vec<String>,
    pub rhs: GTree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    pub productions: Vec<Production>,
    pub start: usize,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("undefined nonterminal `{0}`")]
    Undefined(String),
    #[error("nonterminal `{0}` is defined twice")]
    Duplicate(String),
    #[error("`{name}` takes {expected} arguments, found {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("cyclic dependency through `{0}`")]
    Cyclic(String),
    #[error("production `{0}` uses a parameter it does not declare")]
    BadParameter(String),
    #[error("empty grammar")]
    Empty,
}

impl Grammar {
    /// The single-production grammar `Start -> d`.
    pub fn trivial(d: &DTerm) -> Grammar {
        fn tree(d: &DTerm) -> GTree {
            match d {
                DTerm::Axiom(a) => GTree::leaf(Symbol::Axiom(*a)),
                DTerm::N => GTree::leaf(Symbol::N),
                DTerm::D(a, b) => GTree::d(tree(a), tree(b)),
            }
        }
        Grammar {
            productions: vec![Production { name: "Start".into(), params: vec![], rhs: tree(d) }],
            start: 0,
        }
    }

    /// The DAG of `d` as a grammar: one parameterless nonterminal per
    /// inner node occurring more than once. Its size is twice the
    /// compacted size of `d`.
    pub fn from_dag(d: &DTerm) -> Grammar {
        let dag = DTermDag::compact(std::slice::from_ref(d));
        let root = dag.roots()[0];
        let mut refs = vec![0usize; dag.len()];
        for id in 0..dag.len() {
            if let DagNode::D(a, b) = dag.node(id) {
                refs[a] += 1;
                refs[b] += 1;
            }
        }
        let mut productions = Vec::new();
        let mut nt_of: HashMap<usize, usize> = HashMap::new();
        // DAG ids are topologically ordered, children first.
        for (id, &count) in refs.iter().enumerate() {
            let shared = count > 1 && matches!(dag.node(id), DagNode::D(..));
            if shared || id == root {
                let rhs = dag_tree(&dag, id, &nt_of, true);
                let name = if id == root { "Start".to_string() } else { format!("S{}", productions.len() + 1) };
                nt_of.insert(id, productions.len());
                productions.push(Production { name, params: vec![], rhs });
            }
        }
        let start = productions.len() - 1;
        Grammar { productions, start }
    }

    pub fn start(&self) -> &Production {
        &self.productions[self.start]
    }

    pub fn rank(&self, s: Symbol) -> usize {
        match s {
            Symbol::D => 2,
            Symbol::Axiom(_) | Symbol::N => 0,
            Symbol::Nt(i) => self.productions[i].params.len(),
        }
    }

    /// Total number of right-hand-side edges.
    pub fn size(&self) -> usize {
        self.productions.iter().map(|p| p.rhs.edges()).sum()
    }

    /// Checks arities, parameter use and acyclicity, returning the
    /// productions in dependency order (callees first).
    pub fn validate(&self) -> Result<Vec<usize>, GrammarError> {
        if self.productions.is_empty() || self.start >= self.productions.len() {
            return Err(GrammarError::Empty);
        }
        for p in &self.productions {
            let mut bad = false;
            p.rhs.visit_params(&mut |i| bad |= i >= p.params.len());
            if bad {
                return Err(GrammarError::BadParameter(p.name.clone()));
            }
            check_arity(self, &p.rhs)?;
        }
        // Depth-first topological sort.
        let n = self.productions.len();
        let mut state = vec![0u8; n];
        let mut order = Vec::with_capacity(n);
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, Vec<usize>)> = vec![(root, self.callees(root))];
            state[root] = 1;
            while let Some((node, pending)) = stack.last_mut() {
                match pending.pop() {
                    Some(c) => match state[c] {
                        0 => {
                            state[c] = 1;
                            let cs = self.callees(c);
                            stack.push((c, cs));
                        }
                        1 => return Err(GrammarError::Cyclic(self.productions[c].name.clone())),
                        _ => {}
                    },
                    None => {
                        state[*node] = 2;
                        order.push(*node);
                        stack.pop();
                    }
                }
            }
        }
        Ok(order)
    }

    fn callees(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.productions[i].rhs.visit_calls(&mut |c| out.push(c));
        out
    }

    /// The D-term generated from the start symbol. Parameterless
    /// nonterminals are expanded once and shared.
    pub fn expand(&self) -> Result<DTerm, GrammarError> {
        let order = self.validate()?;
        let mut constants: Vec<Option<Arc<DTerm>>> = vec![None; self.productions.len()];
        for i in order {
            if self.productions[i].params.is_empty() {
                let t = self.eval(&self.productions[i].rhs, &[], &constants);
                constants[i] = Some(t);
            }
        }
        let start = constants[self.start].clone().ok_or(GrammarError::Arity {
            name: self.start().name.clone(),
            expected: self.start().params.len(),
            found: 0,
        })?;
        Ok(Arc::unwrap_or_clone(start))
    }

    fn eval(&self, t: &GTree, env: &[Arc<DTerm>], constants: &[Option<Arc<DTerm>>]) -> Arc<DTerm> {
        match t {
            GTree::Param(i) => env[*i].clone(),
            GTree::Node(Symbol::D, kids) => {
                let a = self.eval(&kids[0], env, constants);
                let b = self.eval(&kids[1], env, constants);
                Arc::new(DTerm::D(a, b))
            }
            GTree::Node(Symbol::Axiom(a), _) => Arc::new(DTerm::Axiom(*a)),
            GTree::Node(Symbol::N, _) => Arc::new(DTerm::N),
            GTree::Node(Symbol::Nt(i), args) => {
                if args.is_empty() {
                    if let Some(c) = &constants[*i] {
                        return c.clone();
                    }
                }
                let vals: Vec<Arc<DTerm>> = args.iter().map(|a| self.eval(a, env, constants)).collect();
                self.eval(&self.productions[*i].rhs, &vals, constants)
            }
        }
    }

    pub fn parse(text: &str) -> Result<Grammar, GrammarError> {
        let mut raw: Vec<(usize, String, Vec<String>, &str)> = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| GrammarError::Parse { line: no + 1, msg: msg.into() };
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| err("expected `->`"))?;
            let lhs = lhs.trim();
            let (name, params) = match lhs.split_once('(') {
                None => (lhs.to_string(), Vec::new()),
                Some((n, rest)) => {
                    let inner = rest.strip_suffix(')').ok_or_else(|| err("unclosed parameter list"))?;
                    let ps: Vec<String> = inner.split(',').map(|s| s.trim().to_string()).collect();
                    (n.trim().to_string(), ps)
                }
            };
            if !is_nt_name(&name) {
                return Err(err(&format!("bad nonterminal name `{name}`")));
            }
            if let Some(p) = params.iter().find(|p| !is_param_name(p)) {
                return Err(err(&format!("bad parameter name `{p}`")));
            }
            raw.push((no + 1, name, params, rhs.trim()));
        }
        if raw.is_empty() {
            return Err(GrammarError::Empty);
        }
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, (_, name, _, _)) in raw.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(GrammarError::Duplicate(name.clone()));
            }
        }
        let mut productions = Vec::with_capacity(raw.len());
        for (line, name, params, rhs) in &raw {
            let mut p = TreeParser { s: rhs.as_bytes(), pos: 0, line: *line, params, index: &index };
            let tree = p.tree()?;
            p.skip_ws();
            if p.pos != p.s.len() {
                return Err(p.err("trailing input"));
            }
            productions.push(Production { name: name.clone(), params: params.clone(), rhs: tree });
        }
        let start = index.get("Start").copied().unwrap_or(productions.len() - 1);
        let g = Grammar { productions, start };
        g.validate()?;
        Ok(g)
    }

    pub(crate) fn write_tree(&self, t: &GTree, params: &[String], out: &mut String) {
        match t {
            GTree::Param(i) => out.push_str(&params[*i]),
            GTree::Node(s, kids) => {
                match s {
                    Symbol::D => out.push('D'),
                    Symbol::Axiom(a) => out.push_str(&a.0.to_string()),
                    Symbol::N => out.push('n'),
                    Symbol::Nt(i) => out.push_str(&self.productions[*i].name),
                }
                if !kids.is_empty() {
                    out.push('(');
                    for (j, k) in kids.iter().enumerate() {
                        if j > 0 {
                            out.push(',');
                        }
                        self.write_tree(k, params, out);
                    }
                    out.push(')');
                }
            }
        }
    }
}

fn dag_tree(dag: &DTermDag, id: usize, nt_of: &HashMap<usize, usize>, top: bool) -> GTree {
    if !top {
        if let Some(&nt) = nt_of.get(&id) {
            return GTree::leaf(Symbol::Nt(nt));
        }
    }
    match dag.node(id) {
        DagNode::Axiom(a) => GTree::leaf(Symbol::Axiom(a)),
        DagNode::N => GTree::leaf(Symbol::N),
        DagNode::D(a, b) => GTree::d(dag_tree(dag, a, nt_of, false), dag_tree(dag, b, nt_of, false)),
    }
}

fn check_arity(g: &Grammar, t: &GTree) -> Result<(), GrammarError> {
    if let GTree::Node(s, kids) = t {
        let expected = match s {
            Symbol::Nt(i) if *i >= g.productions.len() => return Err(GrammarError::Undefined(format!("#{i}"))),
            _ => g.rank(*s),
        };
        if expected != kids.len() {
            let name = match s {
                Symbol::Nt(i) => g.productions[*i].name.clone(),
                Symbol::D => "D".into(),
                Symbol::Axiom(a) => a.to_string(),
                Symbol::N => "n".into(),
            };
            return Err(GrammarError::Arity { name, expected, found: kids.len() });
        }
        for k in kids {
            check_arity(g, k)?;
        }
    }
    Ok(())
}

fn is_param_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase())
        && s != "n"
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_nt_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_uppercase())
        && s != "D"
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

struct TreeParser<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    params: &'a [String],
    index: &'a HashMap<&'a str, usize>,
}

impl TreeParser<'_> {
    fn err(&self, msg: &str) -> GrammarError {
        GrammarError::Parse { line: self.line, msg: format!("{msg} at column {}", self.pos + 1) }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || b"_'".contains(&self.s[self.pos])) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("")
    }

    fn args(&mut self) -> Result<Vec<GTree>, GrammarError> {
        let mut out = Vec::new();
        if !self.eat(b'(') {
            return Ok(out);
        }
        loop {
            out.push(self.tree()?);
            if self.eat(b')') {
                return Ok(out);
            }
            if !self.eat(b',') {
                return Err(self.err("expected `,` or `)`"));
            }
        }
    }

    fn tree(&mut self) -> Result<GTree, GrammarError> {
        let w = self.word().to_string();
        if w.is_empty() {
            return Err(self.err("expected a tree"));
        }
        if let Ok(id) = w.parse::<u32>() {
            return Ok(GTree::leaf(Symbol::Axiom(AxiomId(id))));
        }
        if w == "n" {
            return Ok(GTree::leaf(Symbol::N));
        }
        if let Some(i) = self.params.iter().position(|p| *p == w) {
            return Ok(GTree::Param(i));
        }
        let args = self.args()?;
        if w == "D" {
            return Ok(GTree::Node(Symbol::D, args));
        }
        match self.index.get(w.as_str()) {
            Some(&i) => Ok(GTree::Node(Symbol::Nt(i), args)),
            None => Err(GrammarError::Undefined(w)),
        }
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.productions {
            let mut rhs = String::new();
            self.write_tree(&p.rhs, &p.params, &mut rhs);
            if p.params.is_empty() {
                writeln!(f, "{} -> {rhs}", p.name)?;
            } else {
                writeln!(f, "{}({}) -> {rhs}", p.name, p.params.join(","))?;
            }
        }
        Ok(())
    }
}
