//! D-terms: proof structures as full binary trees.

mod dag;
mod notation;

pub use dag::{dims, DTermDag, DagNode, Dimensions};
pub use notation::{parse_dnotation, parse_dnotation_with, print_dnotation, DNotationError};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxiomId(pub u32);

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A condensed-detachment proof structure. `D(major, minor)` detaches the
/// minor premise from the major premise; `N` is Meredith's `n`, a minor
/// premise whose formula does not matter for the conclusion.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DTerm {
    Axiom(AxiomId),
    N,
    D(Arc<DTerm>, Arc<DTerm>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Major,
    Minor,
}

/// Root-to-node path; the empty path addresses the root.
pub type Path = Vec<Side>;

impl DTerm {
    pub fn axiom(id: u32) -> DTerm {
        DTerm::Axiom(AxiomId(id))
    }

    pub fn d(major: DTerm, minor: DTerm) -> DTerm {
        DTerm::D(Arc::new(major), Arc::new(minor))
    }

    pub fn is_leaf(&self) -> bool {
        !matches!(self, DTerm::D(..))
    }

    pub fn children(&self) -> Option<(&DTerm, &DTerm)> {
        match self {
            DTerm::D(a, b) => Some((a, b)),
            _ => None,
        }
    }

    /// Number of inner nodes.
    pub fn tree_size(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            if let DTerm::D(a, b) = d {
                n += 1;
                stack.push(a);
                stack.push(b);
            }
        }
        n
    }

    pub fn height(&self) -> usize {
        let mut h = 0;
        let mut stack = vec![(self, 0)];
        while let Some((d, depth)) = stack.pop() {
            match d {
                DTerm::D(a, b) => {
                    stack.push((a, depth + 1));
                    stack.push((b, depth + 1));
                }
                _ => h = h.max(depth),
            }
        }
        h
    }

    /// Nodes (inner and leaf) in the tree.
    pub fn node_count(&self) -> usize {
        2 * self.tree_size() + 1
    }

    pub fn contains_n(&self) -> bool {
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            match d {
                DTerm::N => return true,
                DTerm::D(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                DTerm::Axiom(_) => {}
            }
        }
        false
    }

    pub fn axiom_ids(&self) -> BTreeSet<AxiomId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            match d {
                DTerm::Axiom(id) => {
                    out.insert(*id);
                }
                DTerm::D(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                DTerm::N => {}
            }
        }
        out
    }

    /// Every `N` leaf replaced by `replacement`.
    pub fn replace_n(&self, replacement: &DTerm) -> DTerm {
        match self {
            DTerm::N => replacement.clone(),
            DTerm::Axiom(_) => self.clone(),
            DTerm::D(a, b) => {
                if !self.contains_n() {
                    return self.clone();
                }
                DTerm::D(Arc::new(a.replace_n(replacement)), Arc::new(b.replace_n(replacement)))
            }
        }
    }

    /// `N` may only stand as a minor premise.
    pub fn n_positions_valid(&self) -> bool {
        if matches!(self, DTerm::N) {
            return false;
        }
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            if let DTerm::D(a, b) = d {
                if matches!(**a, DTerm::N) {
                    return false;
                }
                stack.push(a);
                stack.push(b);
            }
        }
        true
    }

    /// All distinct subterms, including `self` and its leaves.
    pub fn subterms(&self) -> BTreeSet<DTerm> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            if out.insert(d.clone()) {
                if let DTerm::D(a, b) = d {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out
    }

    pub fn at(&self, path: &[Side]) -> Option<&DTerm> {
        let mut cur = self;
        for side in path {
            let (a, b) = cur.children()?;
            cur = match side {
                Side::Major => a,
                Side::Minor => b,
            };
        }
        Some(cur)
    }

    /// Copy of `self` with the subterm at `path` replaced. `None` when the
    /// path runs through a leaf.
    pub fn replace_at(&self, path: &[Side], replacement: DTerm) -> Option<DTerm> {
        let Some((first, rest)) = path.split_first() else {
            return Some(replacement);
        };
        let DTerm::D(a, b) = self else {
            return None;
        };
        Some(match first {
            Side::Major => DTerm::D(Arc::new(a.replace_at(rest, replacement)?), b.clone()),
            Side::Minor => DTerm::D(a.clone(), Arc::new(b.replace_at(rest, replacement)?)),
        })
    }

    /// Paths of all nodes in pre-order.
    pub fn positions(&self) -> Vec<Path> {
        let mut out = Vec::new();
        let mut stack = vec![(self, Vec::new())];
        while let Some((d, path)) = stack.pop() {
            if let DTerm::D(a, b) = d {
                let mut minor = path.clone();
                minor.push(Side::Minor);
                let mut major = path.clone();
                major.push(Side::Major);
                stack.push((b, minor));
                stack.push((a, major));
            }
            out.push(path);
        }
        out
    }

    /// Index of the node at `path` in post-order (major subtree, minor
    /// subtree, node).
    pub fn postorder_index(&self, path: &[Side]) -> Option<usize> {
        let mut offset = 0;
        let mut cur = self;
        for side in path {
            let (a, b) = cur.children()?;
            match side {
                Side::Major => cur = a,
                Side::Minor => {
                    offset += a.node_count();
                    cur = b;
                }
            }
        }
        Some(offset + cur.node_count() - 1)
    }
}

impl fmt::Display for DTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_dnotation(self))
    }
}

impl fmt::Debug for DTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_dnotation(self))
    }
}
