//! Message passing, ensemble analysis and simulation for sparse-graph codes
//! and random constraint satisfaction problems.

pub mod channels;
pub mod codes;
pub mod decoders;
pub mod density_evolution;
pub mod error;
pub mod harness;
pub mod info;
pub mod llr;
pub mod markov_channels;
pub mod rng;
pub mod rs_free_energy;
pub mod satisfiability;
pub mod weight_enumerator;

pub use error::{Error, Result};
