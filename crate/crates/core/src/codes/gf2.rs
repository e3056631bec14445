//! Bit-packed GF(2) matrices and null-space extraction.

use rand::Rng;

use super::TannerGraph;
use crate::error::{Error, Result};

/// `M × N` binary matrix with rows packed into `u64` words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n: usize,
    words: usize,
    rows: Vec<Vec<u64>>,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

fn get(row: &[u64], j: usize) -> bool {
    (row[j / 64] >> (j % 64)) & 1 == 1
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn unpack(row: &[u64], n: usize) -> Vec<u8> {
    (0..n).map(|j| get(row, j) as u8).collect()
}

fn pack(x: &[u8]) -> Vec<u64> {
    let mut row = vec![0u64; words_for(x.len())];
    for (j, &b) in x.iter().enumerate() {
        if b & 1 == 1 {
            row[j / 64] |= 1 << (j % 64);
        }
    }
    row
}

impl ParityCheckMatrix {
    pub fn from_graph(g: &TannerGraph) -> Self {
        let n = g.n();
        let words = words_for(n);
        let mut rows = vec![vec![0u64; words]; g.m()];
        for &(i, a) in g.edges() {
            rows[a][i / 64] ^= 1 << (i % 64);
        }
        ParityCheckMatrix { n, words, rows }
    }

    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        let mut packed = Vec::with_capacity(rows.len());
        for r in rows {
            if r.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: r.len(),
                });
            }
            packed.push(pack(r));
        }
        Ok(ParityCheckMatrix {
            n,
            words: words_for(n),
            rows: packed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, a: usize, i: usize) -> bool {
        get(&self.rows[a], i)
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows.iter().map(|r| unpack(r, self.n)).collect()
    }

    pub fn to_graph(&self) -> TannerGraph {
        let rows: Vec<Vec<usize>> = self
            .rows
            .iter()
            .map(|r| (0..self.n).filter(|&j| get(r, j)).collect())
            .collect();
        TannerGraph::from_check_rows(self.n, &rows).expect("packed rows have no duplicates")
    }

    /// True iff every row has even overlap with `x`.
    pub fn is_codeword(&self, x: &[u8]) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: x.len(),
            });
        }
        let px = pack(x);
        Ok(self.rows.iter().all(|r| {
            r.iter().zip(&px).map(|(a, b)| (a & b).count_ones()).sum::<u32>() % 2 == 0
        }))
    }

    /// Reduced row echelon form; returns the nonzero rows and their pivot columns.
    fn rref(&self) -> (Vec<Vec<u64>>, Vec<usize>) {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.n {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&q| get(&rows[q], col)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot_row = rows[r].clone();
            let w0 = col / 64;
            for (q, row) in rows.iter_mut().enumerate() {
                if q != r && get(row, col) {
                    xor_into(&mut row[w0..], &pivot_row[w0..]);
                }
            }
            pivots.push(col);
            r += 1;
        }
        rows.truncate(r);
        (rows, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// `1 − rank/N`.
    pub fn actual_rate(&self) -> f64 {
        1.0 - self.rank() as f64 / self.n as f64
    }

    /// A basis of the null space, of size `N − rank(H)`.
    pub fn codeword_basis(&self) -> Vec<Vec<u8>> {
        self.packed_basis().iter().map(|b| unpack(b, self.n)).collect()
    }

    fn packed_basis(&self) -> Vec<Vec<u64>> {
        let (rows, pivots) = self.rref();
        let mut is_pivot = vec![false; self.n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::with_capacity(self.n - pivots.len());
        for f in (0..self.n).filter(|&j| !is_pivot[j]) {
            let mut v = vec![0u64; self.words];
            v[f / 64] |= 1 << (f % 64);
            for (row, &p) in rows.iter().zip(&pivots) {
                if get(row, f) {
                    v[p / 64] |= 1 << (p % 64);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Precomputes a sampler drawing uniform codewords.
    pub fn codeword_sampler(&self) -> CodewordSampler {
        CodewordSampler {
            n: self.n,
            words: self.words,
            basis: self.packed_basis(),
        }
    }

    pub fn sample_codeword<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u8> {
        self.codeword_sampler().sample(rng)
    }
}

/// Uniform codeword sampler: a random GF(2) combination of a fixed basis.
#[derive(Debug, Clone)]
pub struct CodewordSampler {
    n: usize,
    words: usize,
    basis: Vec<Vec<u64>>,
}

impl CodewordSampler {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u8> {
        let mut acc = vec![0u64; self.words];
        for b in &self.basis {
            if rng.random::<bool>() {
                xor_into(&mut acc, b);
            }
        }
        unpack(&acc, self.n)
    }

    /// All `2^dimension` codewords, in Gray-code order.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<Vec<u8>>> {
        let mut out = Vec::new();
        self.for_each(limit, |w| out.push(w.to_vec()))?;
        Ok(out)
    }

    /// Visits every codeword in Gray-code order without storing them.
    pub fn for_each<F: FnMut(&[u8])>(&self, limit: usize, mut f: F) -> Result<()> {
        let d = self.dimension();
        if d > limit {
            return Err(Error::CodeTooLarge { dimension: d, limit });
        }
        let supports: Vec<Vec<usize>> = self
            .basis
            .iter()
            .map(|b| (0..self.n).filter(|&j| get(b, j)).collect())
            .collect();
        let mut word = vec![0u8; self.n];
        f(&word);
        for step in 1u64..(1u64 << d) {
            for &j in &supports[step.trailing_zeros() as usize] {
                word[j] ^= 1;
            }
            f(&word);
        }
        Ok(())
    }
}
