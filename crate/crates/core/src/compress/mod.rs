//! Proof structure compression: parameterized tree grammars and
//! combinator terms.

mod comb;
mod grammar;
mod repair;

pub use comb::{
    reduce, reduce_with, to_combinators, CombError, CombTerm, Leaf, Strategy, DEFAULT_STEP_CAP,
};
pub use grammar::{GTree, Grammar, GrammarError, Production, Symbol};
pub use repair::{compress, inline_single_use, MAX_RANK};
