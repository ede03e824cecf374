use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::{AxiomId, DTerm};

/// ⟨compacted size, tree size, height⟩.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Dimensions {
    pub compacted: usize,
    pub tree: usize,
    pub height: usize,
}

impl Dimensions {
    pub const fn new(compacted: usize, tree: usize, height: usize) -> Self {
        Dimensions { compacted, tree, height }
    }
}

impl fmt::Display for Dimensions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{},{}>", self.compacted, self.tree, self.height)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DagNode {
    Axiom(AxiomId),
    N,
    D(usize, usize),
}

/// Minimal DAG of a multiset of D-terms. Node identity is the node kind plus
/// the ids of its (already shared) children, so two ids never denote equal
/// subterms.
#[derive(Clone, Debug, Default)]
pub struct DTermDag {
    nodes: Vec<DagNode>,
    index: HashMap<DagNode, usize>,
    roots: Vec<usize>,
}

impl DTermDag {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn compact(terms: &[DTerm]) -> Self {
        let mut dag = Self::new();
        for t in terms {
            let id = dag.insert(t);
            dag.roots.push(id);
        }
        dag
    }

    fn intern(&mut self, node: DagNode) -> usize {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node);
        self.index.insert(node, id);
        id
    }

    /// Adds `t` without registering it as a root.
    pub fn insert(&mut self, t: &DTerm) -> usize {
        // Post-order with an explicit stack; pointer-identical Arc subtrees are
        // resolved once.
        let mut memo: HashMap<*const DTerm, usize> = HashMap::new();
        let mut results: Vec<usize> = Vec::new();
        let mut stack: Vec<(&DTerm, bool)> = vec![(t, false)];
        while let Some((d, expanded)) = stack.pop() {
            let key = d as *const DTerm;
            if let Some(&id) = memo.get(&key) {
                results.push(id);
                continue;
            }
            match d {
                DTerm::Axiom(a) => {
                    let id = self.intern(DagNode::Axiom(*a));
                    results.push(id);
                }
                DTerm::N => {
                    let id = self.intern(DagNode::N);
                    results.push(id);
                }
                DTerm::D(a, b) => {
                    if expanded {
                        let minor = results.pop().expect("minor result");
                        let major = results.pop().expect("major result");
                        let id = self.intern(DagNode::D(major, minor));
                        memo.insert(key, id);
                        results.push(id);
                    } else {
                        stack.push((d, true));
                        stack.push((b, false));
                        stack.push((a, false));
                    }
                }
            }
        }
        results.pop().expect("root result")
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn node(&self, id: usize) -> DagNode {
        self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of inner (`D`) nodes.
    pub fn inner_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, DagNode::D(..))).count()
    }

    /// Expands every root back to a tree. Shared nodes become shared `Arc`s.
    pub fn expand(&self) -> Vec<DTerm> {
        let all = self.expand_all();
        self.roots.iter().map(|&r| all[r].clone()).collect()
    }

    /// The tree denoted by every node, indexed by node id.
    pub fn expand_all(&self) -> Vec<DTerm> {
        let mut built: Vec<Arc<DTerm>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let t = match *node {
                DagNode::Axiom(a) => DTerm::Axiom(a),
                DagNode::N => DTerm::N,
                DagNode::D(x, y) => DTerm::D(built[x].clone(), built[y].clone()),
            };
            built.push(Arc::new(t));
        }
        built.iter().map(|t| (**t).clone()).collect()
    }

    /// Text edge list: one `node -> child` line per edge, labelled by kind.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for (id, node) in self.nodes.iter().enumerate() {
            match node {
                DagNode::Axiom(a) => out.push_str(&format!("{id} [axiom {a}]\n")),
                DagNode::N => out.push_str(&format!("{id} [n]\n")),
                DagNode::D(x, y) => {
                    out.push_str(&format!("{id} [D]\n{id} -> {x} [major]\n{id} -> {y} [minor]\n"))
                }
            }
        }
        for r in &self.roots {
            out.push_str(&format!("root {r}\n"));
        }
        out
    }
}

/// Dimensions of a multiset of D-terms: `c` over the shared minimal DAG,
/// `t` summed, `h` maximal. `N` counts as a leaf.
pub fn dims(terms: &[DTerm]) -> Dimensions {
    let dag = DTermDag::compact(terms);
    Dimensions {
        compacted: dag.inner_count(),
        tree: terms.iter().map(DTerm::tree_size).sum(),
        height: terms.iter().map(DTerm::height).max().unwrap_or(0),
    }
}
