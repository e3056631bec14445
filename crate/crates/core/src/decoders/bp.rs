//! Flooding-schedule belief propagation in half-log-likelihood form.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::DecodeResult;
use crate::codes::TannerGraph;
use crate::error::{Error, Result};
use crate::llr::{check_rule_extrinsic, hard_decision, DEFAULT_LLR_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BpConfig {
    pub max_iter: usize,
    pub llr_cap: f64,
    /// Stop as soon as the hard decision is a codeword.
    pub early_stop: bool,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig {
            max_iter: 200,
            llr_cap: DEFAULT_LLR_CAP,
            early_stop: true,
        }
    }
}

/// Per-edge messages `h_{i→a}`, `u_{a→i}` plus the channel log-likelihoods.
#[derive(Debug, Clone)]
pub struct BpState<'g> {
    graph: &'g TannerGraph,
    cap: f64,
    b: Vec<f64>,
    h: Vec<f64>,
    u: Vec<f64>,
    iteration: usize,
    scratch_in: Vec<f64>,
    scratch_out: Vec<f64>,
}

impl<'g> BpState<'g> {
    /// Starts from `u = 0` on every edge.
    pub fn new(graph: &'g TannerGraph, llrs: &[f64], cap: f64) -> Result<Self> {
        if llrs.len() != graph.n() {
            return Err(Error::LengthMismatch {
                expected: graph.n(),
                actual: llrs.len(),
            });
        }
        let e = graph.num_edges();
        let mut st = BpState {
            graph,
            cap,
            b: Vec::new(),
            h: vec![0.0; e],
            u: vec![0.0; e],
            iteration: 0,
            scratch_in: Vec::new(),
            scratch_out: Vec::new(),
        };
        st.set_channel_llrs(llrs)?;
        Ok(st)
    }

    /// Replaces the channel log-likelihoods, keeping the messages.
    pub fn set_channel_llrs(&mut self, llrs: &[f64]) -> Result<()> {
        if llrs.len() != self.graph.n() {
            return Err(Error::LengthMismatch {
                expected: self.graph.n(),
                actual: llrs.len(),
            });
        }
        self.b = llrs.iter().map(|&v| self.clamp(v)).collect();
        Ok(())
    }

    fn clamp(&self, v: f64) -> f64 {
        if v.is_nan() {
            0.0
        } else {
            v.clamp(-self.cap, self.cap)
        }
    }

    pub fn graph(&self) -> &TannerGraph {
        self.graph
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn channel_llrs(&self) -> &[f64] {
        &self.b
    }

    /// Variable-to-check messages from the latest step, indexed by edge.
    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Check-to-variable messages, indexed by edge.
    pub fn u(&self) -> &[f64] {
        &self.u
    }

    /// `Σ_{a∈∂i} u_{a→i}` for each variable.
    pub fn incoming_sums(&self) -> Vec<f64> {
        (0..self.graph.n())
            .map(|i| self.graph.var_edges(i).iter().map(|&e| self.u[e]).sum())
            .collect()
    }

    /// `B_i + Σ_{a∈∂i} u_{a→i}`.
    pub fn totals(&self) -> Vec<f64> {
        self.incoming_sums().iter().zip(&self.b).map(|(s, b)| s + b).collect()
    }

    /// Hard decisions by sign; exact zeros are settled by a fair coin.
    /// Returns the decision and the number of coin flips used.
    pub fn decide<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<u8>, usize) {
        let mut ties = 0;
        let x = self
            .totals()
            .into_iter()
            .map(|t| {
                hard_decision(t).unwrap_or_else(|| {
                    ties += 1;
                    rng.random::<bool>() as u8
                })
            })
            .collect();
        (x, ties)
    }

    /// One parallel iteration: all `h` from the current `u`, then all `u` from the new `h`.
    pub fn step(&mut self) {
        let g = self.graph;
        for i in 0..g.n() {
            let edges = g.var_edges(i);
            let total: f64 = self.b[i] + edges.iter().map(|&e| self.u[e]).sum::<f64>();
            for &e in edges {
                self.h[e] = self.clamp(total - self.u[e]);
            }
        }
        for a in 0..g.m() {
            let edges = g.chk_edges(a);
            self.scratch_in.clear();
            self.scratch_in.extend(edges.iter().map(|&e| self.h[e]));
            self.scratch_out.resize(edges.len(), 0.0);
            check_rule_extrinsic(&self.scratch_in, &mut self.scratch_out);
            for (k, &e) in edges.iter().enumerate() {
                self.u[e] = self.clamp(self.scratch_out[k]);
            }
        }
        self.iteration += 1;
    }

    /// Posterior log-likelihoods with saturated entries reported as ±∞.
    pub fn posterior_llrs(&self) -> Vec<f64> {
        self.totals()
            .into_iter()
            .map(|t| {
                if t >= self.cap {
                    f64::INFINITY
                } else if t <= -self.cap {
                    f64::NEG_INFINITY
                } else {
                    t
                }
            })
            .collect()
    }
}

/// BP with the default cap and early stopping.
pub fn bp_decode<R: Rng + ?Sized>(
    graph: &TannerGraph,
    llrs: &[f64],
    max_iter: usize,
    rng: &mut R,
) -> Result<DecodeResult> {
    let cfg = BpConfig {
        max_iter,
        ..BpConfig::default()
    };
    bp_decode_with(graph, llrs, &cfg, None, rng)
}

/// BP decoding; when `truth` is given the bit-error count of every decision is recorded.
pub fn bp_decode_with<R: Rng + ?Sized>(
    graph: &TannerGraph,
    llrs: &[f64],
    cfg: &BpConfig,
    truth: Option<&[u8]>,
    rng: &mut R,
) -> Result<DecodeResult> {
    if let Some(t) = truth {
        graph.expect_len(t)?;
    }
    let mut state = BpState::new(graph, llrs, cfg.llr_cap)?;
    let mut trace = truth.map(|_| Vec::with_capacity(cfg.max_iter + 1));
    let mut tie_breaks = 0;
    loop {
        let (x, ties) = state.decide(rng);
        tie_breaks += ties;
        if let (Some(tr), Some(t)) = (trace.as_mut(), truth) {
            tr.push(x.iter().zip(t).filter(|(a, b)| a != b).count());
        }
        let converged = graph.is_codeword(&x)?;
        if (converged && cfg.early_stop) || state.iteration() >= cfg.max_iter {
            return Ok(DecodeResult {
                estimate: x,
                iterations: state.iteration(),
                converged,
                bit_error_trace: trace,
                tie_breaks,
                posterior_llrs: Some(state.posterior_llrs()),
                unsat_trace: None,
            });
        }
        state.step();
    }
}
