//! Generic sum-product on binary factor graphs, instantiated for k-SAT.
//!
//! Variables take values in `{0, 1}`; for formulas `1` means True.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exhaustive enumeration limit for formulas.
pub const BRUTE_FORCE_LIMIT: usize = 24;

/// A factor over an ordered scope; bit `j` of a table index is the value of `scope[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub scope: Vec<usize>,
    pub table: Vec<f64>,
}

impl Factor {
    pub fn from_fn(scope: Vec<usize>, psi: impl Fn(&[u8]) -> f64) -> Self {
        let k = scope.len();
        let mut x = vec![0u8; k];
        let table = (0..1usize << k)
            .map(|idx| {
                for (j, v) in x.iter_mut().enumerate() {
                    *v = ((idx >> j) & 1) as u8;
                }
                psi(&x)
            })
            .collect();
        Factor { scope, table }
    }

    /// Even-parity indicator.
    pub fn parity(scope: Vec<usize>) -> Self {
        Self::from_fn(scope, |x| if x.iter().filter(|&&v| v == 1).count() % 2 == 0 { 1.0 } else { 0.0 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorGraphGeneric {
    n: usize,
    factors: Vec<Factor>,
    /// `(factor, position in scope)` for each edge.
    edges: Vec<(usize, usize)>,
    var_edges: Vec<Vec<usize>>,
    fac_edges: Vec<Vec<usize>>,
}

impl FactorGraphGeneric {
    pub fn new(n: usize, factors: Vec<Factor>) -> Result<Self> {
        let mut edges = Vec::new();
        let mut var_edges = vec![Vec::new(); n];
        let mut fac_edges = Vec::with_capacity(factors.len());
        for (a, f) in factors.iter().enumerate() {
            if f.table.len() != 1usize << f.scope.len() {
                return Err(Error::InvalidParameter(format!("factor {a}: table size does not match scope")));
            }
            if f.table.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(Error::InvalidParameter(format!("factor {a}: compatibility values must be finite and ≥ 0")));
            }
            let mut seen = f.scope.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != f.scope.len() || f.scope.iter().any(|&i| i >= n) {
                return Err(Error::InvalidParameter(format!("factor {a}: invalid scope")));
            }
            let mut fe = Vec::with_capacity(f.scope.len());
            for (pos, &i) in f.scope.iter().enumerate() {
                var_edges[i].push(edges.len());
                fe.push(edges.len());
                edges.push((a, pos));
            }
            fac_edges.push(fe);
        }
        Ok(FactorGraphGeneric {
            n,
            factors,
            edges,
            var_edges,
            fac_edges,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// `(factor, variable)` of an edge.
    pub fn edge(&self, e: usize) -> (usize, usize) {
        let (a, pos) = self.edges[e];
        (a, self.factors[a].scope[pos])
    }

    pub fn var_edges(&self, i: usize) -> &[usize] {
        &self.var_edges[i]
    }

    pub fn fac_edges(&self, a: usize) -> &[usize] {
        &self.fac_edges[a]
    }

    /// Parity checks of a Tanner graph plus unary factors `∝ e^{±B_i}`.
    /// Edge `e` of the Tanner graph maps to edge `e` here.
    pub fn from_tanner(graph: &crate::codes::TannerGraph, llrs: &[f64]) -> Result<Self> {
        if llrs.len() != graph.n() {
            return Err(Error::LengthMismatch { expected: graph.n(), actual: llrs.len() });
        }
        let mut factors: Vec<Factor> = Vec::with_capacity(graph.m() + graph.n());
        let mut g = FactorGraphGeneric::new(graph.n(), Vec::new())?;
        // Build edges in Tanner edge order so that indices coincide.
        for a in 0..graph.m() {
            factors.push(Factor::parity(graph.chk_edges(a).iter().map(|&e| graph.edge(e).0).collect()));
        }
        let mut edges = vec![(0, 0); graph.num_edges()];
        let mut var_edges = vec![Vec::new(); graph.n()];
        let mut fac_edges = vec![Vec::new(); graph.m()];
        for a in 0..graph.m() {
            for (pos, &e) in graph.chk_edges(a).iter().enumerate() {
                debug_assert_eq!(graph.edge(e).1, a);
                edges[e] = (a, pos);
                fac_edges[a].push(e);
            }
        }
        for i in 0..graph.n() {
            var_edges[i].extend_from_slice(graph.var_edges(i));
        }
        for (i, &b) in llrs.iter().enumerate() {
            let a = factors.len();
            let m = b.max(-b);
            factors.push(Factor {
                scope: vec![i],
                table: vec![(b - m).exp(), (-b - m).exp()],
            });
            var_edges[i].push(edges.len());
            fac_edges.push(vec![edges.len()]);
            edges.push((a, 0));
        }
        g.factors = factors;
        g.edges = edges;
        g.var_edges = var_edges;
        g.fac_edges = fac_edges;
        Ok(g)
    }
}

/// Initial variable-to-factor messages.
#[derive(Debug, Clone, PartialEq)]
pub enum BpInit {
    Uniform,
    /// One message per edge.
    Messages(Vec<[f64; 2]>),
}

/// Flooding sum-product with per-message normalization and optional damping.
#[derive(Debug, Clone)]
pub struct GenericBp<'g> {
    graph: &'g FactorGraphGeneric,
    damping: f64,
    var_to_fac: Vec<[f64; 2]>,
    fac_to_var: Vec<[f64; 2]>,
    iteration: usize,
}

fn normalized(m: [f64; 2]) -> Option<[f64; 2]> {
    let z = m[0] + m[1];
    (z > 0.0 && z.is_finite()).then(|| [m[0] / z, m[1] / z])
}

impl<'g> GenericBp<'g> {
    pub fn new(graph: &'g FactorGraphGeneric, init: BpInit, damping: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&damping) {
            return Err(Error::InvalidParameter("damping must lie in [0, 1)".into()));
        }
        let e = graph.num_edges();
        let var_to_fac = match init {
            BpInit::Uniform => vec![[0.5, 0.5]; e],
            BpInit::Messages(m) => {
                if m.len() != e {
                    return Err(Error::LengthMismatch { expected: e, actual: m.len() });
                }
                m.into_iter()
                    .enumerate()
                    .map(|(k, v)| normalized(v).ok_or(Error::Contradiction { variable: graph.edge(k).1 }))
                    .collect::<Result<_>>()?
            }
        };
        Ok(GenericBp {
            graph,
            damping,
            var_to_fac,
            fac_to_var: vec![[0.5, 0.5]; e],
            iteration: 0,
        })
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn var_to_fac(&self) -> &[[f64; 2]] {
        &self.var_to_fac
    }

    pub fn fac_to_var(&self) -> &[[f64; 2]] {
        &self.fac_to_var
    }

    /// Factor messages from the current variable messages, then variable messages from those.
    pub fn step(&mut self) -> Result<()> {
        let g = self.graph;
        let d = self.damping;
        for (a, f) in g.factors.iter().enumerate() {
            let edges = &g.fac_edges[a];
            let k = edges.len();
            let mut out = vec![[0.0; 2]; k];
            for (idx, &psi) in f.table.iter().enumerate() {
                if psi == 0.0 {
                    continue;
                }
                for p in 0..k {
                    let mut w = psi;
                    for (q, &e) in edges.iter().enumerate() {
                        if q != p {
                            w *= self.var_to_fac[e][(idx >> q) & 1];
                        }
                    }
                    out[p][(idx >> p) & 1] += w;
                }
            }
            for (p, &e) in edges.iter().enumerate() {
                let new = normalized(out[p]).ok_or(Error::Contradiction { variable: g.edge(e).1 })?;
                self.fac_to_var[e] = mix(new, self.fac_to_var[e], d);
            }
        }
        for i in 0..g.n {
            let edges = &g.var_edges[i];
            for &e in edges {
                let mut m = [1.0, 1.0];
                for &b in edges {
                    if b != e {
                        m[0] *= self.fac_to_var[b][0];
                        m[1] *= self.fac_to_var[b][1];
                        if let Some(v) = normalized(m) {
                            m = v;
                        }
                    }
                }
                let new = normalized(m).ok_or(Error::Contradiction { variable: i })?;
                self.var_to_fac[e] = mix(new, self.var_to_fac[e], d);
            }
        }
        self.iteration += 1;
        Ok(())
    }

    /// `ν̄_i ∝ Π_{b∈∂i} ν̂_{b→i}`.
    pub fn marginals(&self) -> Result<Vec<[f64; 2]>> {
        (0..self.graph.n)
            .map(|i| {
                let mut m = [1.0, 1.0];
                for &b in &self.graph.var_edges[i] {
                    m[0] *= self.fac_to_var[b][0];
                    m[1] *= self.fac_to_var[b][1];
                    m = normalized(m).ok_or(Error::Contradiction { variable: i })?;
                }
                normalized(m).ok_or(Error::Contradiction { variable: i })
            })
            .collect()
    }
}

fn mix(new: [f64; 2], old: [f64; 2], d: f64) -> [f64; 2] {
    if d == 0.0 {
        new
    } else {
        [(1.0 - d) * new[0] + d * old[0], (1.0 - d) * new[1] + d * old[1]]
    }
}

/// Runs `iterations` flooding rounds and returns `ν̄_i(0), ν̄_i(1)` per variable.
pub fn generic_bp(graph: &FactorGraphGeneric, iterations: usize, init: BpInit, damping: f64) -> Result<Vec<[f64; 2]>> {
    let mut bp = GenericBp::new(graph, init, damping)?;
    for _ in 0..iterations {
        bp.step()?;
    }
    bp.marginals()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn satisfied_by(&self, value: u8) -> bool {
        (value == 1) != self.negated
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub n: usize,
    pub clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        let f = CnfFormula { n, clauses };
        f.validate()?;
        Ok(f)
    }

    /// Clauses given as 1-based signed integers, DIMACS style.
    pub fn from_signed(n: usize, clauses: &[&[i64]]) -> Result<Self> {
        let cl = clauses
            .iter()
            .map(|c| c.iter().map(|&l| signed_literal(l, n, 0)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Self::new(n, cl)
    }

    pub fn validate(&self) -> Result<()> {
        for (a, c) in self.clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::InvalidParameter(format!("clause {a} is empty")));
            }
            let mut vars: Vec<usize> = c.iter().map(|l| l.var).collect();
            vars.sort_unstable();
            vars.dedup();
            if vars.len() != c.len() || vars.last().is_some_and(|&v| v >= self.n) {
                return Err(Error::InvalidParameter(format!("clause {a} must involve distinct valid variables")));
            }
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_satisfied(&self, x: &[u8]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.satisfied_by(x[l.var])))
    }

    pub fn to_factor_graph(&self) -> Result<FactorGraphGeneric> {
        let factors = self
            .clauses
            .iter()
            .map(|c| {
                let lits = c.clone();
                Factor::from_fn(c.iter().map(|l| l.var).collect(), move |x| {
                    if lits.iter().zip(x).any(|(l, &v)| l.satisfied_by(v)) {
                        1.0
                    } else {
                        0.0
                    }
                })
            })
            .collect();
        FactorGraphGeneric::new(self.n, factors)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.n, self.m());
        for c in &self.clauses {
            for l in c {
                let v = l.var as i64 + 1;
                let _ = write!(s, "{} ", if l.negated { -v } else { v });
            }
            s.push_str("0\n");
        }
        s
    }

    pub fn from_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line_no = ln + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
                continue;
            }
            if t.starts_with('p') {
                let parts: Vec<&str> = t.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" || header.is_some() {
                    return Err(dimacs(line_no, "bad problem line"));
                }
                let n = parts[2].parse().map_err(|_| dimacs(line_no, "bad variable count"))?;
                let m = parts[3].parse().map_err(|_| dimacs(line_no, "bad clause count"))?;
                header = Some((n, m));
                continue;
            }
            let (n, _) = header.ok_or_else(|| dimacs(line_no, "clause before problem line"))?;
            for tok in t.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| dimacs(line_no, "non-integer literal"))?;
                if v == 0 {
                    if current.is_empty() {
                        return Err(dimacs(line_no, "empty clause"));
                    }
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(signed_literal(v, n, line_no)?);
                }
            }
        }
        let (n, m) = header.ok_or_else(|| dimacs(0, "missing problem line"))?;
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != m {
            return Err(dimacs(0, &format!("header declares {m} clauses, found {}", clauses.len())));
        }
        CnfFormula::new(n, clauses).map_err(|e| dimacs(0, &e.to_string()))
    }

    pub fn read_dimacs(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_dimacs(&text)
    }

    pub fn write_dimacs(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_dimacs()).map_err(|e| Error::io(path, e))
    }
}

fn dimacs(line: usize, reason: &str) -> Error {
    Error::Dimacs {
        line,
        reason: reason.to_string(),
    }
}

fn signed_literal(v: i64, n: usize, line: usize) -> Result<Literal> {
    let var = v.unsigned_abs() as usize;
    if v == 0 || var > n {
        return Err(dimacs(line, &format!("literal {v} out of range")));
    }
    Ok(Literal {
        var: var - 1,
        negated: v < 0,
    })
}

/// Exact marginals under the uniform measure over solutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatMarginals {
    /// `μ(x_i = True)`.
    pub p_true: Vec<f64>,
    pub solutions: u64,
}

pub fn brute_force_marginals(formula: &CnfFormula) -> Result<SatMarginals> {
    let n = formula.n;
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::CodeTooLarge {
            dimension: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let masks: Vec<(u32, u32)> = formula
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0, 0), |(p, q), l| {
                if l.negated {
                    (p, q | 1 << l.var)
                } else {
                    (p | 1 << l.var, q)
                }
            })
        })
        .collect();
    let mut count = vec![0u64; n];
    let mut solutions = 0u64;
    for x in 0u32..(1u32 << n) {
        if masks.iter().all(|&(p, q)| x & p != 0 || !x & q != 0) {
            solutions += 1;
            for (i, c) in count.iter_mut().enumerate() {
                *c += ((x >> i) & 1) as u64;
            }
        }
    }
    if solutions == 0 {
        return Err(Error::Unsatisfiable);
    }
    Ok(SatMarginals {
        p_true: count.iter().map(|&c| c as f64 / solutions as f64).collect(),
        solutions,
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `M = round(Nα)` clauses, each on a uniform `k`-subset with uniform signs.
/// With `distinct`, repeated clauses are rejected and redrawn.
pub fn random_ksat<R: Rng + ?Sized>(n: usize, alpha: f64, k: usize, distinct: bool, rng: &mut R) -> Result<CnfFormula> {
    if k == 0 || k > n || !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter("need 1 ≤ k ≤ N and α ≥ 0".into()));
    }
    let m = (n as f64 * alpha).round() as usize;
    let pool = binomial(n, k) * 2f64.powi(k as i32);
    if m as f64 > pool {
        return Err(Error::InvalidParameter(format!("M = {m} exceeds C(N,k)·2^k = {pool}")));
    }
    let mut seen = std::collections::HashSet::new();
    let mut clauses = Vec::with_capacity(m);
    while clauses.len() < m {
        let mut vars = sample_indices(rng, n, k).into_vec();
        vars.sort_unstable();
        let clause: Vec<Literal> = vars
            .into_iter()
            .map(|var| Literal {
                var,
                negated: rng.random(),
            })
            .collect();
        if distinct && !seen.insert(clause.clone()) {
            continue;
        }
        clauses.push(clause);
    }
    CnfFormula::new(n, clauses)
}

/// A rooted tree formula. Variable 0 is the root; every clause holds its
/// parent variable first, followed by `k − 1` fresh children.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeFormula {
    pub k: usize,
    pub depth: usize,
    pub formula: CnfFormula,
    /// Generation of each variable.
    pub generation: Vec<usize>,
    /// Clauses hanging below each variable.
    pub children: Vec<Vec<usize>>,
}

impl TreeFormula {
    /// Variables at generation `depth`.
    pub fn boundary(&self) -> Vec<usize> {
        (0..self.formula.n).filter(|&v| self.generation[v] == self.depth && self.depth > 0).collect()
    }

    /// Root pair `(Z(False), Z(True))` normalized, with boundary values fixed.
    /// `None` when the boundary assignment has no extension.
    fn root_weights(&self, fixed: &[Option<u8>]) -> Option<[f64; 2]> {
        let n = self.formula.n;
        let mut w = vec![[1.0f64, 1.0]; n];
        // Children always have larger indices than parents.
        for v in (0..n).rev() {
            let mut acc = match fixed[v] {
                Some(0) => [1.0, 0.0],
                Some(_) => [0.0, 1.0],
                None => [1.0, 1.0],
            };
            for &c in &self.children[v] {
                let clause = &self.formula.clauses[c];
                let parent = clause[0];
                let mut all = 1.0;
                let mut unsat = 1.0;
                for l in &clause[1..] {
                    let z = w[l.var];
                    all *= z[0] + z[1];
                    unsat *= if l.negated { z[1] } else { z[0] };
                }
                for (val, a) in acc.iter_mut().enumerate() {
                    *a *= if parent.satisfied_by(val as u8) { all } else { all - unsat };
                }
            }
            w[v] = normalized(acc)?;
        }
        Some(w[0])
    }
}

/// Samples from `T_*(t)`: each variable above generation `t` spawns
/// `Poisson(kα)` clauses, each with `k − 1` fresh children and uniform signs.
pub fn sample_tree_formula<R: Rng + ?Sized>(k: usize, alpha: f64, t: usize, rng: &mut R) -> Result<TreeFormula> {
    if k < 2 || !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter("need k ≥ 2 and α ≥ 0".into()));
    }
    let poisson = if alpha > 0.0 {
        Some(Poisson::new(k as f64 * alpha).map_err(|e| Error::InvalidParameter(e.to_string()))?)
    } else {
        None
    };
    let mut generation = vec![0usize];
    let mut children: Vec<Vec<usize>> = vec![Vec::new()];
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut v = 0;
    while v < generation.len() {
        if generation[v] < t {
            let count = poisson.as_ref().map_or(0, |p| p.sample(rng) as usize);
            for _ in 0..count {
                let mut clause = vec![Literal { var: v, negated: rng.random() }];
                for _ in 1..k {
                    let c = generation.len();
                    generation.push(generation[v] + 1);
                    children.push(Vec::new());
                    clause.push(Literal { var: c, negated: rng.random() });
                }
                children[v].push(clauses.len());
                clauses.push(clause);
            }
        }
        v += 1;
    }
    let formula = CnfFormula::new(generation.len(), clauses)?;
    Ok(TreeFormula {
        k,
        depth: t,
        formula,
        generation,
        children,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProbeMethod {
    /// All boundary assignments; fails above `limit` boundary variables.
    Exhaustive { limit: usize },
    /// Uniform boundary samples; the spread is a lower bound.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayProbe {
    /// `max` over admissible boundaries of `½ ln(μ(True|x_t)/μ(False|x_t))`.
    pub h_max: f64,
    pub h_min: f64,
    /// `max − min` of `μ(True|x_t)`.
    pub mu_spread: f64,
    pub boundary_size: usize,
    pub admissible: usize,
}

fn half_ln(w: [f64; 2]) -> f64 {
    match (w[1] == 0.0, w[0] == 0.0) {
        (true, _) => f64::NEG_INFINITY,
        (_, true) => f64::INFINITY,
        _ => 0.5 * (w[1] / w[0]).ln(),
    }
}

pub fn decay_probe(tree: &TreeFormula, method: &ProbeMethod) -> Result<DecayProbe> {
    let boundary = tree.boundary();
    let b = boundary.len();
    let mut fixed = vec![None; tree.formula.n];
    let mut h_max = f64::NEG_INFINITY;
    let mut h_min = f64::INFINITY;
    let mut mu_max = f64::NEG_INFINITY;
    let mut mu_min = f64::INFINITY;
    let mut admissible = 0;
    let mut visit = |bits: &dyn Fn(usize) -> u8, fixed: &mut Vec<Option<u8>>| {
        for (j, &v) in boundary.iter().enumerate() {
            fixed[v] = Some(bits(j));
        }
        if let Some(w) = tree.root_weights(fixed) {
            admissible += 1;
            let h = half_ln(w);
            h_max = h_max.max(h);
            h_min = h_min.min(h);
            mu_max = mu_max.max(w[1]);
            mu_min = mu_min.min(w[1]);
        }
    };
    match *method {
        ProbeMethod::Exhaustive { limit } => {
            if b > limit.min(40) {
                return Err(Error::CodeTooLarge { dimension: b, limit });
            }
            for idx in 0u64..(1u64 << b) {
                visit(&|j| ((idx >> j) & 1) as u8, &mut fixed);
            }
        }
        ProbeMethod::Sampled { samples, seed } => {
            let mut rng = crate::rng::seeded(seed);
            for _ in 0..samples.max(1) {
                let bits: Vec<u8> = (0..b).map(|_| rng.random::<bool>() as u8).collect();
                visit(&|j| bits[j], &mut fixed);
            }
        }
    }
    if admissible == 0 {
        return Err(Error::Degenerate("no boundary assignment extends to a solution".into()));
    }
    Ok(DecayProbe {
        h_max,
        h_min,
        mu_spread: mu_max - mu_min,
        boundary_size: b,
        admissible,
    })
}
