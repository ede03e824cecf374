//! Greedy digram compression of tree grammars.
//!
//! Starts from the DAG grammar and repeatedly replaces the most frequent
//! digram (a parent symbol, a child position and the child's symbol) by a
//! new parameterized nonterminal, as long as that shrinks the grammar.
//! Nonterminals used only once are inlined at the end.

use std::collections::HashMap;

use super::grammar::{GTree, Grammar, Production, Symbol};
use crate::dterm::DTerm;

/// Largest parameter count of a generated nonterminal.
pub const MAX_RANK: usize = 4;

type Digram = (Symbol, usize, Symbol);

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    count: usize,
    first: usize,
}

/// Compresses `d` with at most `max_rounds` digram replacements.
pub fn compress(d: &DTerm, max_rounds: usize) -> Grammar {
    let mut g = Grammar::from_dag(d);
    let mut fresh = 1;
    for _ in 0..max_rounds {
        let Some(digram) = best_digram(&g) else { break };
        let before = g.size();
        let snapshot = g.clone();
        replace(&mut g, digram, &mut fresh);
        if g.size() >= before {
            g = snapshot;
            break;
        }
    }
    inline_single_use(&mut g);
    g
}

fn symbol_of(t: &GTree) -> Option<Symbol> {
    match t {
        GTree::Node(s, _) => Some(*s),
        GTree::Param(_) => None,
    }
}

/// Counts non-overlapping occurrences top-down. In a chain of equal
/// digrams `a(a(a(...)))` every other link is taken.
fn count(g: &Grammar) -> HashMap<Digram, Tally> {
    let mut tallies: HashMap<Digram, Tally> = HashMap::new();
    let mut seq = 0;
    for p in &g.productions {
        let mut stack: Vec<(&GTree, Option<Digram>)> = vec![(&p.rhs, None)];
        while let Some((t, consumed_by)) = stack.pop() {
            let GTree::Node(a, kids) = t else { continue };
            let mut taken: Vec<Option<Digram>> = vec![None; kids.len()];
            for (i, k) in kids.iter().enumerate() {
                let Some(b) = symbol_of(k) else { continue };
                let dg = (*a, i, b);
                if consumed_by == Some(dg) && *a == b {
                    continue;
                }
                let e = tallies.entry(dg).or_insert(Tally { count: 0, first: seq });
                e.count += 1;
                seq += 1;
                if *a == b {
                    taken[i] = Some(dg);
                }
            }
            for (k, c) in kids.iter().zip(taken).rev() {
                stack.push((k, c));
            }
        }
    }
    tallies
}

fn best_digram(g: &Grammar) -> Option<Digram> {
    count(g)
        .into_iter()
        .filter(|((a, _, b), t)| {
            let (ra, rb) = (g.rank(*a), g.rank(*b));
            ra + rb - 1 <= MAX_RANK && t.count > ra + rb
        })
        .max_by(|(da, ta), (db, tb)| ta.count.cmp(&tb.count).then(tb.first.cmp(&ta.first)).then(db.cmp(da)))
        .map(|(d, _)| d)
}

fn replace(g: &mut Grammar, (a, i, b): Digram, fresh: &mut usize) {
    let (ra, rb) = (g.rank(a), g.rank(b));
    let nt = g.productions.len();
    let mut params = Vec::with_capacity(ra + rb - 1);
    let mut next = 0;
    let mut outer = Vec::with_capacity(ra);
    for j in 0..ra {
        if j == i {
            let inner: Vec<GTree> = (0..rb).map(|k| GTree::Param(next + k)).collect();
            next += rb;
            outer.push(GTree::Node(b, inner));
        } else {
            outer.push(GTree::Param(next));
            next += 1;
        }
    }
    for k in 0..next {
        params.push(param_name(k));
    }
    let mut name = format!("A{fresh}");
    while g.productions.iter().any(|p| p.name == name) {
        *fresh += 1;
        name = format!("A{fresh}");
    }
    *fresh += 1;
    for p in g.productions.iter_mut() {
        rewrite(&mut p.rhs, (a, i, b), nt);
    }
    g.productions.push(Production { name, params, rhs: GTree::Node(a, outer) });
}

fn param_name(k: usize) -> String {
    const NAMES: &[&str] = &["v", "w", "x", "y", "z"];
    NAMES.get(k).map(|s| s.to_string()).unwrap_or_else(|| format!("v{k}"))
}

fn rewrite(t: &mut GTree, dg: Digram, nt: usize) {
    let (a, i, b) = dg;
    let GTree::Node(s, kids) = t else { return };
    if *s == a && kids.get(i).and_then(symbol_of) == Some(b) {
        // The matched child dissolves; its children and the parent's other
        // children become the arguments of the new nonterminal.
        let mut args = Vec::new();
        for (j, k) in std::mem::take(kids).into_iter().enumerate() {
            match k {
                GTree::Node(_, inner) if j == i => args.extend(inner),
                k => args.push(k),
            }
        }
        *t = GTree::Node(Symbol::Nt(nt), args);
    }
    if let GTree::Node(_, kids) = t {
        for k in kids.iter_mut() {
            rewrite(k, dg, nt);
        }
    }
}

/// Removes unused nonterminals and inlines those used exactly once.
pub fn inline_single_use(g: &mut Grammar) {
    loop {
        let mut uses = vec![0usize; g.productions.len()];
        for p in &g.productions {
            p.rhs.visit_calls(&mut |c| uses[c] += 1);
        }
        let victim = (0..g.productions.len()).find(|&i| i != g.start && uses[i] <= 1);
        let Some(v) = victim else { break };
        if uses[v] == 1 {
            let body = g.productions[v].rhs.clone();
            for p in g.productions.iter_mut() {
                substitute_call(&mut p.rhs, v, &body);
            }
        }
        remove_production(g, v);
    }
}

fn substitute_call(t: &mut GTree, nt: usize, body: &GTree) {
    if let GTree::Node(s, kids) = t {
        for k in kids.iter_mut() {
            substitute_call(k, nt, body);
        }
        if *s == Symbol::Nt(nt) {
            let args = std::mem::take(kids);
            *t = instantiate(body, &args);
        }
    }
}

fn instantiate(body: &GTree, args: &[GTree]) -> GTree {
    match body {
        GTree::Param(i) => args[*i].clone(),
        GTree::Node(s, kids) => GTree::Node(*s, kids.iter().map(|k| instantiate(k, args)).collect()),
    }
}

fn remove_production(g: &mut Grammar, v: usize) {
    g.productions.remove(v);
    if g.start > v {
        g.start -= 1;
    }
    fn shift(t: &mut GTree, v: usize) {
        if let GTree::Node(s, kids) = t {
            if let Symbol::Nt(i) = s {
                if *i > v {
                    *i -= 1;
                }
            }
            kids.iter_mut().for_each(|k| shift(k, v));
        }
    }
    for p in g.productions.iter_mut() {
        shift(&mut p.rhs, v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dterm::{dims, parse_dnotation};

    #[test]
    fn nothing_to_compress() {
        let d = parse_dnotation("D11").unwrap();
        let g = compress(&d, 100);
        assert_eq!(g.size(), 2);
        assert_eq!(g.expand().unwrap(), d);
    }

    #[test]
    fn chain_compresses() {
        // Eight nested copies of D(v,1).
        let d = parse_dnotation("DDDDDDDD111111111").unwrap();
        let g = compress(&d, 100);
        assert_eq!(g.expand().unwrap(), d);
        assert!(g.size() <= 2 * dims(std::slice::from_ref(&d)).compacted);
        assert!(g.size() < 16, "{g}");
    }

    #[test]
    fn deterministic() {
        let d = parse_dnotation("DDDD1D131DDD131DD1322").unwrap();
        assert_eq!(compress(&d, 100), compress(&d, 100));
    }
}
