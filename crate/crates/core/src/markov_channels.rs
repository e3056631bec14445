//! Finite-state Markov-modulated BSCs (Gilbert–Elliott family).
//!
//! `P[next][current]` is column-stochastic. At each step the state moves
//! first and the output is produced with the crossover of the new state:
//! `p(x_t, y_t, σ_t | σ_{t−1}) = ½·P[σ_t][σ_{t−1}]·BSC_{ε_{σ_t}}(y_t | x_t)`.

use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codes::TannerGraph;
use crate::decoders::{BpState, DecodeResult};
use crate::error::{Error, Result};
use crate::llr::DEFAULT_LLR_CAP;
use crate::rng::seeded;

const STOCHASTIC_TOL: f64 = 1e-9;
const STEADY_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovChannelSpec {
    /// Column-stochastic transition matrix, `p[next][current]`.
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    /// Crossover probability per state.
    pub eps: Vec<f64>,
    /// Distribution of `σ₀`; the steady state when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<f64>>,
}

impl MarkovChannelSpec {
    pub fn new(p: Vec<Vec<f64>>, eps: Vec<f64>) -> Result<Self> {
        let s = MarkovChannelSpec { p, eps, initial: None };
        s.validate()?;
        Ok(s)
    }

    /// The three-state example: `ε = (0.01, 0.11, 0.5)`.
    pub fn three_state_example() -> Self {
        MarkovChannelSpec::new(
            vec![
                vec![0.99, 0.005, 0.02],
                vec![0.005, 0.99, 0.02],
                vec![0.005, 0.005, 0.96],
            ],
            vec![0.01, 0.11, 0.5],
        )
        .expect("static spec")
    }

    /// Two-state channel with stay probabilities `g` (good) and `b` (bad).
    pub fn gilbert_elliott(g: f64, b: f64, eps_good: f64, eps_bad: f64) -> Result<Self> {
        Self::new(vec![vec![g, 1.0 - b], vec![1.0 - g, b]], vec![eps_good, eps_bad])
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: Self = serde_json::from_str(&text).map_err(|e| Error::format(path, e))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn states(&self) -> usize {
        self.eps.len()
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.eps.len();
        if s == 0 || self.p.len() != s || self.p.iter().any(|r| r.len() != s) {
            return Err(Error::InvalidParameter("P must be s×s with s = len(eps) > 0".into()));
        }
        for c in 0..s {
            let col: f64 = (0..s).map(|r| self.p[r][c]).sum();
            if (col - 1.0).abs() > STOCHASTIC_TOL || (0..s).any(|r| self.p[r][c] < 0.0) {
                return Err(Error::InvalidParameter(format!("column {c} of P is not a distribution")));
            }
        }
        if self.eps.iter().any(|&e| !(0.0..=0.5).contains(&e)) {
            return Err(Error::InvalidParameter("crossover probabilities must lie in [0, 1/2]".into()));
        }
        if let Some(init) = &self.initial {
            if init.len() != s || init.iter().any(|&v| v < 0.0) || (init.iter().sum::<f64>() - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvalidParameter("initial distribution invalid".into()));
            }
        }
        Ok(())
    }

    /// Irreducible and aperiodic: some power of the support pattern is all positive.
    pub fn is_ergodic(&self) -> bool {
        let s = self.states();
        let adj: Vec<Vec<bool>> = self.p.iter().map(|r| r.iter().map(|&v| v > 0.0).collect()).collect();
        let mut pow = adj.clone();
        let bound = (s - 1) * (s - 1) + 1;
        for _ in 1..bound.max(1) {
            if pow.iter().all(|r| r.iter().all(|&b| b)) {
                return true;
            }
            let mut next = vec![vec![false; s]; s];
            for i in 0..s {
                for j in 0..s {
                    next[i][j] = (0..s).any(|m| pow[i][m] && adj[m][j]);
                }
            }
            pow = next;
        }
        pow.iter().all(|r| r.iter().all(|&b| b))
    }

    /// `p = e(I − Pᵀ + E)⁻¹`, with power iteration when the system is singular.
    pub fn steady_state(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let s = self.states();
        let pm = DMatrix::from_fn(s, s, |i, j| self.p[i][j]);
        let a = DMatrix::identity(s, s) - pm.transpose() + DMatrix::from_element(s, s, 1.0);
        // p·A = e  ⇔  Aᵀ·pᵀ = eᵀ
        let solved = a.transpose().lu().solve(&nalgebra::DVector::from_element(s, 1.0));
        let candidate = solved.map(|v| v.iter().copied().collect::<Vec<f64>>());
        match candidate {
            Some(p) if self.stationary_residual(&p) <= STEADY_RESIDUAL_TOL && p.iter().all(|&v| v >= -1e-12) => {
                Ok(p.into_iter().map(|v| v.max(0.0)).collect())
            }
            _ => self.power_iteration(),
        }
    }

    fn stationary_residual(&self, p: &[f64]) -> f64 {
        (0..self.states())
            .map(|i| ((0..self.states()).map(|j| self.p[i][j] * p[j]).sum::<f64>() - p[i]).abs())
            .fold(0.0, f64::max)
    }

    fn power_iteration(&self) -> Result<Vec<f64>> {
        let s = self.states();
        let mut p = vec![1.0 / s as f64; s];
        for _ in 0..1_000_000 {
            let mut next: Vec<f64> = (0..s).map(|i| (0..s).map(|j| self.p[i][j] * p[j]).sum()).collect();
            // Lazy averaging handles periodic chains.
            for (n, o) in next.iter_mut().zip(&p) {
                *n = 0.5 * (*n + o);
            }
            p = next;
            if self.stationary_residual(&p) <= STEADY_RESIDUAL_TOL {
                return Ok(p);
            }
        }
        Err(Error::Singular("steady state did not converge".into()))
    }

    pub fn initial_distribution(&self) -> Result<Vec<f64>> {
        match &self.initial {
            Some(v) => Ok(v.clone()),
            None => self.steady_state(),
        }
    }

    /// `Σ p_i ε_i` under the steady state.
    pub fn average_crossover(&self) -> Result<f64> {
        Ok(self.steady_state()?.iter().zip(&self.eps).map(|(p, e)| p * e).sum())
    }

    /// `BSC_{ε_σ}(y | x)`.
    pub fn emission(&self, state: usize, x: u8, y: u8) -> f64 {
        let e = self.eps[state];
        if x == y {
            1.0 - e
        } else {
            e
        }
    }
}

fn draw<R: Rng + ?Sized>(dist: impl Iterator<Item = f64>, rng: &mut R) -> usize {
    let mut r: f64 = rng.random();
    let mut last = 0;
    for (i, p) in dist.enumerate() {
        if r < p {
            return i;
        }
        r -= p;
        last = i;
    }
    last
}

/// One sample path: `states[0..=N]`, uniform inputs and outputs `1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GecSample {
    pub states: Vec<usize>,
    pub inputs: Vec<u8>,
    pub outputs: Vec<u8>,
}

pub fn sample_sequence<R: Rng + ?Sized>(spec: &MarkovChannelSpec, n: usize, rng: &mut R) -> Result<GecSample> {
    let init = spec.initial_distribution()?;
    let inputs: Vec<u8> = (0..n).map(|_| rng.random::<bool>() as u8).collect();
    transmit(spec, &inputs, &init, rng)
}

/// Sends a given input word through the channel.
pub fn transmit<R: Rng + ?Sized>(spec: &MarkovChannelSpec, inputs: &[u8], init: &[f64], rng: &mut R) -> Result<GecSample> {
    let s = spec.states();
    let mut states = Vec::with_capacity(inputs.len() + 1);
    let mut sigma = draw(init.iter().copied(), rng);
    states.push(sigma);
    let mut outputs = Vec::with_capacity(inputs.len());
    for &x in inputs {
        sigma = draw((0..s).map(|i| spec.p[i][sigma]), rng);
        states.push(sigma);
        let flip = rng.random::<f64>() < spec.eps[sigma];
        outputs.push(x ^ flip as u8);
    }
    Ok(GecSample {
        states,
        inputs: inputs.to_vec(),
        outputs,
    })
}

/// Normalized forward message and accumulated `Σ ln λ_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardState {
    pub nu: Vec<f64>,
    pub log_norm: f64,
}

impl ForwardState {
    /// `ln p(σ_N = σ, observations)`.
    pub fn log_joint(&self, sigma: usize) -> f64 {
        self.nu[sigma].ln() + self.log_norm
    }
}

/// Forward recursion over `y` (and `x` when given), normalizing at every step.
pub fn forward(spec: &MarkovChannelSpec, ys: &[u8], xs: Option<&[u8]>) -> Result<ForwardState> {
    let s = spec.states();
    if let Some(x) = xs {
        if x.len() != ys.len() {
            return Err(Error::LengthMismatch {
                expected: ys.len(),
                actual: x.len(),
            });
        }
    }
    let mut nu = spec.initial_distribution()?;
    let mut log_norm = 0.0;
    let mut next = vec![0.0; s];
    for (t, &y) in ys.iter().enumerate() {
        for (sp, slot) in next.iter_mut().enumerate() {
            let prior: f64 = (0..s).map(|sg| spec.p[sp][sg] * nu[sg]).sum();
            let lik = match xs {
                Some(x) => 0.5 * spec.emission(sp, x[t], y),
                None => 0.5 * (spec.emission(sp, 0, y) + spec.emission(sp, 1, y)),
            };
            *slot = prior * lik;
        }
        let lambda: f64 = next.iter().sum();
        if lambda <= 0.0 {
            return Err(Error::Degenerate(format!("observation at t={} has zero probability", t + 1)));
        }
        log_norm += lambda.ln();
        for (n, v) in nu.iter_mut().zip(&next) {
            *n = v / lambda;
        }
    }
    Ok(ForwardState { nu, log_norm })
}

/// Entropy-rate estimates in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyRates {
    pub h_y: f64,
    pub h_xy: f64,
    /// `I = H(Y)/N − (H(X,Y)/N − 1)`.
    pub info_rate: f64,
    pub n: usize,
}

/// `−(1/N)·Σ log₂ λ_t` for `Y` alone and for `(X, Y)` on one long sample path.
pub fn entropy_rates(spec: &MarkovChannelSpec, n: usize, seed: u64) -> Result<EntropyRates> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let sample = sample_sequence(spec, n, &mut seeded(seed))?;
    let fy = forward(spec, &sample.outputs, None)?;
    let fxy = forward(spec, &sample.outputs, Some(&sample.inputs))?;
    let to_rate = |f: &ForwardState| -f.log_norm / std::f64::consts::LN_2 / n as f64;
    let h_y = to_rate(&fy);
    let h_xy = to_rate(&fxy);
    Ok(EntropyRates {
        h_y,
        h_xy,
        info_rate: h_y - (h_xy - 1.0),
        n,
    })
}

/// Channel log-likelihoods from state estimation given bit priors
/// `P(x_t = 0) = prior0[t]`. `window = Some(R)` restricts each estimate to
/// observations in `[t−R, t+R]`.
pub fn channel_llrs(spec: &MarkovChannelSpec, ys: &[u8], prior0: &[f64], window: Option<usize>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = ys.len();
    if prior0.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: prior0.len(),
        });
    }
    let s = spec.states();
    let init = spec.initial_distribution()?;
    let obs = |t: usize, sp: usize| {
        prior0[t] * spec.emission(sp, 0, ys[t]) + (1.0 - prior0[t]) * spec.emission(sp, 1, ys[t])
    };
    let step_fwd = |a: &[f64], t: usize| -> Vec<f64> {
        let mut v: Vec<f64> = (0..s)
            .map(|sp| (0..s).map(|sg| spec.p[sp][sg] * a[sg]).sum::<f64>() * obs(t, sp))
            .collect();
        normalize(&mut v);
        v
    };
    let step_bwd = |b: &[f64], t: usize| -> Vec<f64> {
        // β_{t−1}(σ) = Σ_σ' P[σ'][σ]·obs_t(σ')·β_t(σ')
        let mut v: Vec<f64> = (0..s)
            .map(|sg| (0..s).map(|sp| spec.p[sp][sg] * obs(t, sp) * b[sp]).sum())
            .collect();
        normalize(&mut v);
        v
    };
    // state_prior[t]: law of σ_{t+1} given everything except y_t's bit channel.
    let mut llrs = vec![0.0; n];
    let mut posteriors = vec![vec![0.0; s]; n];
    let mut emit = |t: usize, alpha_prev: &[f64], beta: &[f64]| {
        let mut g: Vec<f64> = (0..s)
            .map(|sp| (0..s).map(|sg| spec.p[sp][sg] * alpha_prev[sg]).sum::<f64>() * beta[sp])
            .collect();
        normalize(&mut g);
        let l0: f64 = (0..s).map(|sp| g[sp] * spec.emission(sp, 0, ys[t])).sum();
        let l1: f64 = (0..s).map(|sp| g[sp] * spec.emission(sp, 1, ys[t])).sum();
        llrs[t] = half_ln_ratio(l0, l1);
        let mut post: Vec<f64> = (0..s).map(|sp| g[sp] * obs(t, sp)).collect();
        normalize(&mut post);
        posteriors[t] = post;
    };
    match window {
        None => {
            let mut alphas = Vec::with_capacity(n + 1);
            alphas.push(init.clone());
            for t in 0..n {
                let next = step_fwd(&alphas[t], t);
                alphas.push(next);
            }
            let mut beta = vec![1.0; s];
            for t in (0..n).rev() {
                emit(t, &alphas[t], &beta);
                beta = step_bwd(&beta, t);
            }
        }
        Some(r) => {
            let stationary = spec.steady_state()?;
            for t in 0..n {
                let start = t.saturating_sub(r);
                let mut alpha = if start == 0 { init.clone() } else { stationary.clone() };
                for tt in start..t {
                    alpha = step_fwd(&alpha, tt);
                }
                let end = (t + r).min(n - 1);
                let mut beta = vec![1.0; s];
                for tt in (t + 1..=end).rev() {
                    beta = step_bwd(&beta, tt);
                }
                emit(t, &alpha, &beta);
            }
        }
    }
    Ok((llrs, posteriors))
}

fn normalize(v: &mut [f64]) {
    let z: f64 = v.iter().sum();
    if z > 0.0 {
        v.iter_mut().for_each(|x| *x /= z);
    }
}

fn half_ln_ratio(a: f64, b: f64) -> f64 {
    match (a == 0.0, b == 0.0) {
        (true, true) => 0.0,
        (false, true) => f64::INFINITY,
        (true, false) => f64::NEG_INFINITY,
        _ => 0.5 * (a / b).ln(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDecodeOptions {
    /// Alternations of channel estimation and one BP iteration.
    pub rounds: usize,
    /// Window radius for state estimation; `None` uses the whole sequence.
    pub window: Option<usize>,
    pub llr_cap: f64,
}

impl Default for JointDecodeOptions {
    fn default() -> Self {
        JointDecodeOptions {
            rounds: 100,
            window: None,
            llr_cap: DEFAULT_LLR_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDecodeResult {
    pub decode: DecodeResult,
    /// Channel log-likelihoods `B_t` from the last estimation round (½·ln convention).
    #[serde(serialize_with = "crate::llr::serialize_llrs")]
    pub channel_llrs: Vec<f64>,
    /// Posterior state marginals of the last round, `σ_t` for `t = 1..=N`.
    pub state_posteriors: Vec<Vec<f64>>,
}

/// Histogram over `[lo, hi)` with `bins` equal cells; values outside are clamped into the end cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(values: &[f64], lo: f64, hi: f64, bins: usize) -> Self {
        let mut counts = vec![0; bins];
        let w = (hi - lo) / bins as f64;
        for &v in values {
            if v.is_nan() {
                continue;
            }
            let idx = ((v - lo) / w).floor();
            let idx = if idx < 0.0 { 0 } else { (idx as usize).min(bins - 1) };
            counts[idx] += 1;
        }
        Histogram { lo, hi, counts }
    }

    pub fn center(&self, i: usize) -> f64 {
        let w = (self.hi - self.lo) / self.counts.len() as f64;
        self.lo + (i as f64 + 0.5) * w
    }

    /// Bin centers of local maxima holding at least `min_frac` of the mass.
    pub fn peaks(&self, min_frac: f64) -> Vec<f64> {
        let total: usize = self.counts.iter().sum();
        let c = &self.counts;
        (0..c.len())
            .filter(|&i| {
                let left = if i == 0 { 0 } else { c[i - 1] };
                let right = if i + 1 == c.len() { 0 } else { c[i + 1] };
                c[i] > 0 && c[i] >= left && c[i] > right && c[i] as f64 >= min_frac * total as f64
            })
            .map(|i| self.center(i))
            .collect()
    }
}

impl JointDecodeResult {
    /// Histogram of the channel messages; `full_log = true` doubles them to the `ln` convention.
    pub fn llr_histogram(&self, full_log: bool, bins: usize, range: f64) -> Histogram {
        let scale = if full_log { 2.0 } else { 1.0 };
        let vals: Vec<f64> = self.channel_llrs.iter().map(|v| v * scale).collect();
        Histogram::new(&vals, -range, range, bins)
    }
}

/// Expected channel-message peaks `±½·ln((1−ε_i)/ε_i)` (½·ln convention).
pub fn state_llr_peaks(spec: &MarkovChannelSpec) -> Vec<f64> {
    let mut v: Vec<f64> = spec
        .eps
        .iter()
        .flat_map(|&e| {
            let m = half_ln_ratio(1.0 - e, e);
            [m, -m]
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Alternates forward–backward state estimation (fed by the code's extrinsic
/// messages) with one flooding BP iteration on the code graph.
pub fn joint_decode_gec<R: Rng + ?Sized>(
    graph: &TannerGraph,
    spec: &MarkovChannelSpec,
    y: &[u8],
    opts: &JointDecodeOptions,
    truth: Option<&[u8]>,
    rng: &mut R,
) -> Result<JointDecodeResult> {
    graph.expect_len(y)?;
    let n = graph.n();
    let mut state = BpState::new(graph, &vec![0.0; n], opts.llr_cap)?;
    let mut trace = truth.map(|_| Vec::new());
    let mut tie_breaks = 0;
    loop {
        let prior0: Vec<f64> = state.incoming_sums().iter().map(|&e| crate::llr::prob_zero(e)).collect();
        let (llrs, posts) = channel_llrs(spec, y, &prior0, opts.window)?;
        state.set_channel_llrs(&llrs)?;
        let (x, ties) = state.decide(rng);
        tie_breaks += ties;
        if let (Some(tr), Some(t)) = (trace.as_mut(), truth) {
            tr.push(x.iter().zip(t).filter(|(a, b)| a != b).count());
        }
        let converged = graph.is_codeword(&x)?;
        if converged || state.iteration() >= opts.rounds {
            return Ok(JointDecodeResult {
                decode: DecodeResult {
                    estimate: x,
                    iterations: state.iteration(),
                    converged,
                    bit_error_trace: trace,
                    tie_breaks,
                    posterior_llrs: Some(state.posterior_llrs()),
                    unsat_trace: None,
                },
                channel_llrs: llrs,
                state_posteriors: posts,
            });
        }
        state.step();
    }
}

/// Channel log-likelihoods when the true state sequence is revealed.
pub fn genie_llrs(spec: &MarkovChannelSpec, sample: &GecSample) -> Vec<f64> {
    sample
        .outputs
        .iter()
        .enumerate()
        .map(|(t, &y)| {
            let s = sample.states[t + 1];
            let m = half_ln_ratio(1.0 - spec.eps[s], spec.eps[s]);
            if y == 0 {
                m
            } else {
                -m
            }
        })
        .collect()
}
