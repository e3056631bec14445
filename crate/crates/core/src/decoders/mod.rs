//! Belief propagation, bit flipping and exhaustive MAP decoding.

mod bp;
mod flip;
mod map;

pub use bp::{bp_decode, bp_decode_with, BpConfig, BpState};
pub use flip::bit_flip_decode;
pub use map::{map_decode_bruteforce, MapResult, MAP_DIMENSION_LIMIT};

use serde::Serialize;

use crate::codes::TannerGraph;
use crate::error::Result;

/// Outcome of one decoding run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeResult {
    pub estimate: Vec<u8>,
    /// BP iterations or bit flips performed.
    pub iterations: usize,
    /// Whether `estimate` satisfies every check.
    pub converged: bool,
    /// Bit errors against the transmitted word, one entry per decision.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bit_error_trace: Option<Vec<usize>>,
    /// Exact-zero decisions resolved by a coin flip.
    pub tie_breaks: usize,
    /// Posterior log-likelihoods `B_i + Σ u`, saturated values reported as ±∞.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "crate::llr::serialize_opt_llrs")]
    pub posterior_llrs: Option<Vec<f64>>,
    /// Number of violated checks after each flip (bit flipping only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unsat_trace: Option<Vec<usize>>,
}

impl DecodeResult {
    pub fn bit_errors(&self, truth: &[u8]) -> usize {
        self.estimate.iter().zip(truth).filter(|(a, b)| a != b).count()
    }
}

/// `U(x)`: number of unsatisfied parity checks.
pub fn unsat_count(graph: &TannerGraph, x: &[u8]) -> Result<usize> {
    graph.unsat_count(x)
}
