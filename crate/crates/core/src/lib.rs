//! Condensed detachment toolkit: formulas, D-terms, most general theorems,
//! structure generators, the SGCD prover loop, proof compression and
//! problem file formats.

pub mod cache;
pub mod compress;
pub mod dterm;
pub mod enumerate;
pub mod formula;
pub mod kernel;
pub mod mgt;
pub mod problem;
pub mod sgcd;
mod store;
