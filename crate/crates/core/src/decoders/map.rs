//! Exhaustive word- and symbol-MAP decoding for small codes.

use serde::Serialize;

use crate::channels::{Channel, Output};
use crate::codes::ParityCheckMatrix;
use crate::error::{Error, Result};

/// Largest code dimension accepted by [`map_decode_bruteforce`].
pub const MAP_DIMENSION_LIMIT: usize = 24;

const ENERGY_TIE_TOL: f64 = 1e-9;
const MARGINAL_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapResult {
    /// A codeword of minimal energy `−Σ ln Q(y_i|x_i)`.
    pub word_map: Vec<u8>,
    /// Number of codewords attaining the minimal energy.
    pub word_map_ties: usize,
    pub min_energy: f64,
    /// Exact posterior `P(x_i = 0 | y)`.
    pub marginals_zero: Vec<f64>,
    /// Most likely value per bit, `None` on an exact tie.
    pub symbol_map: Vec<Option<u8>>,
    /// `ln Σ_x e^{−E(x)}` over the code.
    pub log_partition: f64,
    pub codewords: usize,
}

impl MapResult {
    /// Symbol-MAP bit errors against `truth`; ties count one half.
    pub fn symbol_errors(&self, truth: &[u8]) -> f64 {
        self.symbol_map
            .iter()
            .zip(truth)
            .map(|(d, &t)| match d {
                Some(b) if *b == t => 0.0,
                Some(_) => 1.0,
                None => 0.5,
            })
            .sum()
    }
}

/// Enumerates the null space of `h` and computes word-MAP, marginals and symbol-MAP.
pub fn map_decode_bruteforce(h: &ParityCheckMatrix, channel: &Channel, y: &[Output]) -> Result<MapResult> {
    let n = h.n();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: y.len(),
        });
    }
    let mut cost = Vec::with_capacity(n);
    for &yi in y {
        let c0 = -channel.transition_prob(0, yi)?.ln();
        let c1 = -channel.transition_prob(1, yi)?.ln();
        cost.push([c0, c1]);
    }
    let sampler = h.codeword_sampler();

    let mut best: Option<(f64, Vec<u8>)> = None;
    let mut ties = 0usize;
    // Running log-sum-exp: sums are scaled by e^{shift}.
    let mut shift = f64::NEG_INFINITY;
    let mut total = 0.0;
    let mut s0 = vec![0.0; n];
    let mut count = 0usize;
    sampler.for_each(MAP_DIMENSION_LIMIT, |w| {
        count += 1;
        let e: f64 = w.iter().zip(&cost).map(|(&b, c)| c[b as usize]).sum();
        if !e.is_finite() {
            return;
        }
        match &best {
            Some((be, _)) if e > be + ENERGY_TIE_TOL => {}
            Some((be, _)) if (e - be).abs() <= ENERGY_TIE_TOL => ties += 1,
            _ => {
                best = Some((e, w.to_vec()));
                ties = 1;
            }
        }
        let weight = -e;
        if weight > shift {
            let r = (shift - weight).exp();
            total *= r;
            s0.iter_mut().for_each(|v| *v *= r);
            shift = weight;
        }
        let p = (weight - shift).exp();
        total += p;
        for (j, &b) in w.iter().enumerate() {
            if b == 0 {
                s0[j] += p;
            }
        }
    })?;
    let Some((min_energy, word_map)) = best else {
        return Err(Error::Degenerate("no codeword is compatible with the output".into()));
    };
    let marginals_zero: Vec<f64> = s0.iter().map(|v| v / total).collect();
    let symbol_map = marginals_zero
        .iter()
        .map(|&p| {
            if (p - 0.5).abs() <= MARGINAL_TIE_TOL {
                None
            } else if p > 0.5 {
                Some(0)
            } else {
                Some(1)
            }
        })
        .collect();
    Ok(MapResult {
        word_map,
        word_map_ties: ties,
        min_energy,
        marginals_zero,
        symbol_map,
        log_partition: shift + total.ln(),
        codewords: count,
    })
}
