//! Tanner graphs, regular LDPC ensembles and GF(2) linear algebra.

mod alist;
mod ensemble;
mod gf2;
mod structure;

pub use alist::{from_alist, read_alist, to_alist, write_alist};
pub use ensemble::{sample_regular, sample_regular_with_stats, RegularEnsemble, SampleStats};
pub use gf2::{CodewordSampler, ParityCheckMatrix};
pub use structure::{girth, is_tree_neighborhood, tree_neighborhood_fraction};

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bipartite variable/check graph with explicit edge identities.
///
/// Edge `e` joins variable `edges[e].0` to check `edges[e].1`. Adjacency lists
/// store edge indices, so per-edge message arrays can be indexed directly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    edges: Vec<(usize, usize)>,
    var_edges: Vec<Vec<usize>>,
    chk_edges: Vec<Vec<usize>>,
}

impl TannerGraph {
    /// Builds a graph from `(variable, check)` pairs. Duplicate pairs are rejected.
    pub fn from_edges(n: usize, m: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut var_edges = vec![Vec::new(); n];
        let mut chk_edges = vec![Vec::new(); m];
        for (e, &(i, a)) in edges.iter().enumerate() {
            if i >= n || a >= m {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i},{a}) out of range for N={n}, M={m}"
                )));
            }
            if !seen.insert((i, a)) {
                return Err(Error::InvalidParameter(format!("duplicate edge ({i},{a})")));
            }
            var_edges[i].push(e);
            chk_edges[a].push(e);
        }
        Ok(TannerGraph {
            n,
            m,
            edges,
            var_edges,
            chk_edges,
        })
    }

    /// Builds a graph from check rows given as variable lists.
    pub fn from_check_rows(n: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let edges = rows
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().map(move |&i| (i, a)))
            .collect();
        Self::from_edges(n, rows.len(), edges)
    }

    /// Builds a graph from a dense 0/1 matrix given row by row.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        let mut lists = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            lists.push(row.iter().enumerate().filter(|(_, &b)| b & 1 == 1).map(|(i, _)| i).collect());
        }
        Self::from_check_rows(n, &lists)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Edge indices incident to variable `i`.
    pub fn var_edges(&self, i: usize) -> &[usize] {
        &self.var_edges[i]
    }

    /// Edge indices incident to check `a`.
    pub fn chk_edges(&self, a: usize) -> &[usize] {
        &self.chk_edges[a]
    }

    /// Checks adjacent to variable `i` (∂i).
    pub fn var_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.var_edges[i].iter().map(move |&e| self.edges[e].1)
    }

    /// Variables adjacent to check `a` (∂a).
    pub fn chk_neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.chk_edges[a].iter().map(move |&e| self.edges[e].0)
    }

    pub fn var_degree(&self, i: usize) -> usize {
        self.var_edges[i].len()
    }

    pub fn chk_degree(&self, a: usize) -> usize {
        self.chk_edges[a].len()
    }

    pub fn parity_check_matrix(&self) -> ParityCheckMatrix {
        ParityCheckMatrix::from_graph(self)
    }

    /// Whether check `a` is satisfied by `x`.
    pub fn check_satisfied(&self, a: usize, x: &[u8]) -> bool {
        self.chk_neighbors(a).fold(0u8, |acc, i| acc ^ (x[i] & 1)) == 0
    }

    /// Number of violated checks, `U(x)`.
    pub fn unsat_count(&self, x: &[u8]) -> Result<usize> {
        self.expect_len(x)?;
        Ok((0..self.m).filter(|&a| !self.check_satisfied(a, x)).count())
    }

    pub fn is_codeword(&self, x: &[u8]) -> Result<bool> {
        Ok(self.unsat_count(x)? == 0)
    }

    pub(crate) fn expect_len(&self, x: &[u8]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        Ok(())
    }
}

/// The 3×7 parity-check matrix with rows 1010101, 0110011, 0001111.
pub fn hamming_7_4() -> TannerGraph {
    TannerGraph::from_dense(&[
        vec![1, 0, 1, 0, 1, 0, 1],
        vec![0, 1, 1, 0, 0, 1, 1],
        vec![0, 0, 0, 1, 1, 1, 1],
    ])
    .expect("static matrix")
}
