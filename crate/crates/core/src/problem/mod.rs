//! Problem input and output: TPTP CNF, Meredith step lists and the name
//! registry.

mod meredith;
mod registry;
mod tptp;

pub use meredith::{print_meredith, read_meredith, read_meredith_with, MeredithError, MeredithProof, MeredithStep};
pub use registry::{Registry, RegistryError};
pub use tptp::*;
