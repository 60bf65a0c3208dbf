//! Exact classical simulation of the hidden subgroup algorithm over
//! Weyl-Heisenberg groups of order `p^{2n+1}`.

pub mod error;
pub mod experiment;
pub mod group;
pub mod oracle;
pub mod qft_circuit;
pub mod recovery;
pub mod reps;
pub mod simulator;
pub mod zp;

pub use error::{HspError, Result};
