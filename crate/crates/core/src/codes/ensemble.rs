//! Configuration-model sampling of regular `(l, k)` ensembles.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::TannerGraph;
use crate::error::{Error, Result};

/// Regular ensemble: variable degree `l`, check degree `k`, blocklength `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularEnsemble {
    pub l: usize,
    pub k: usize,
    pub n: usize,
}

impl RegularEnsemble {
    pub fn new(l: usize, k: usize, n: usize) -> Result<Self> {
        let e = RegularEnsemble { l, k, n };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 || self.k <= self.l {
            return Err(Error::InvalidParameter(format!(
                "regular ensemble needs l >= 2 and k > l, got ({}, {})",
                self.l, self.k
            )));
        }
        if self.n == 0 || !(self.n * self.l).is_multiple_of(self.k) {
            return Err(Error::Divisibility {
                l: self.l,
                k: self.k,
                n: self.n,
            });
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.n * self.l / self.k
    }

    /// Number of sockets on either side, `F = N·l = M·k`.
    pub fn sockets(&self) -> usize {
        self.n * self.l
    }

    pub fn design_rate(&self) -> f64 {
        1.0 - self.l as f64 / self.k as f64
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleStats {
    /// Variable/check pairs joined by more than one socket.
    pub multi_edges: usize,
    /// Pairs removed because they carried an even number of sockets.
    pub removed_pairs: usize,
}

pub fn sample_regular<R: Rng + ?Sized>(ens: &RegularEnsemble, rng: &mut R) -> Result<TannerGraph> {
    Ok(sample_regular_with_stats(ens, rng)?.0)
}

/// Draws a graph by matching `N·l` variable sockets to `M·k` check sockets
/// through a uniform permutation. Pairs joined an even number of times are
/// dropped and odd multiplicities collapse to a single edge.
pub fn sample_regular_with_stats<R: Rng + ?Sized>(
    ens: &RegularEnsemble,
    rng: &mut R,
) -> Result<(TannerGraph, SampleStats)> {
    ens.validate()?;
    let mut perm: Vec<usize> = (0..ens.sockets()).collect();
    perm.shuffle(rng);
    let mut mult: HashMap<(usize, usize), usize> = HashMap::with_capacity(ens.sockets());
    let mut order = Vec::with_capacity(ens.sockets());
    for (socket, &target) in perm.iter().enumerate() {
        let pair = (socket / ens.l, target / ens.k);
        let c = mult.entry(pair).or_insert(0);
        if *c == 0 {
            order.push(pair);
        }
        *c += 1;
    }
    let mut stats = SampleStats::default();
    let mut edges = Vec::with_capacity(order.len());
    for pair in order {
        let c = mult[&pair];
        if c > 1 {
            stats.multi_edges += 1;
        }
        if c % 2 == 1 {
            edges.push(pair);
        } else {
            stats.removed_pairs += 1;
        }
    }
    let g = TannerGraph::from_edges(ens.n, ens.m(), edges)?;
    Ok((g, stats))
}
