//! Density evolution by population dynamics, BP thresholds, and the scalar
//! BEC recursion.
//!
//! Message populations keep ±∞ symbolically and clamp finite values to
//! `±cap`. Each generation is computed in fixed-size chunks with seeds derived
//! from `(seed, generation, stage, chunk)`, so results do not depend on the
//! number of worker threads.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{Channel, ChannelKind};
use crate::error::{Error, Result};
use crate::info::{binary_entropy_bits, inverse_binary_entropy};
use crate::llr::{atanh_of_exp, ln_abs_tanh, DEFAULT_LLR_CAP};
use crate::rng::{derive_seed, derived, SimRng};

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    /// Population size 𝒩.
    pub population: usize,
    /// Iteration budget T_max for threshold classification.
    pub max_iter: usize,
    /// P_b below this counts as decoding success.
    pub floor: f64,
    pub llr_cap: f64,
    pub seed: u64,
}

impl Default for DeConfig {
    fn default() -> Self {
        DeConfig {
            population: 100_000,
            max_iter: 500,
            floor: 1e-4,
            llr_cap: DEFAULT_LLR_CAP,
            seed: 1,
        }
    }
}

/// Sampler for the channel log-likelihood `B` given input 0.
#[derive(Debug, Clone)]
enum BSampler {
    Discrete(Vec<(f64, f64)>),
    Gaussian(Normal<f64>),
}

impl BSampler {
    fn new(ch: &Channel) -> Result<Self> {
        ch.validate()?;
        use crate::channels::Output;
        Ok(match *ch {
            Channel::Awgn(s) => BSampler::Gaussian(
                Normal::new(1.0 / (s * s), 1.0 / s).map_err(|e| Error::InvalidParameter(e.to_string()))?,
            ),
            Channel::Bec(_) => {
                let ys = [Output::Bit(0), Output::Erasure];
                BSampler::Discrete(discrete(ch, &ys)?)
            }
            Channel::Bsc(_) | Channel::Z(_) => {
                let ys = [Output::Bit(0), Output::Bit(1)];
                BSampler::Discrete(discrete(ch, &ys)?)
            }
        })
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            BSampler::Gaussian(n) => n.sample(rng),
            BSampler::Discrete(atoms) => {
                let mut r: f64 = rng.random();
                for &(p, v) in atoms {
                    if r < p {
                        return v;
                    }
                    r -= p;
                }
                atoms.last().map_or(0.0, |a| a.1)
            }
        }
    }
}

fn discrete(ch: &Channel, ys: &[crate::channels::Output]) -> Result<Vec<(f64, f64)>> {
    let mut atoms = Vec::new();
    for &y in ys {
        let p = ch.transition_prob(0, y)?;
        if p > 0.0 {
            atoms.push((p, ch.llr(y)?.value()));
        }
    }
    Ok(atoms)
}

/// Clamps finite values to `±cap`, keeps infinities, maps NaN to 0.
fn clamp_ext(v: f64, cap: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else if v.is_infinite() {
        v
    } else {
        v.clamp(-cap, cap)
    }
}

/// Extended-real addition where opposite certainties cancel to 0.
fn add_ext(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_nan() {
        0.0
    } else {
        s
    }
}

/// A multiset of message samples standing in for a message density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub samples: Vec<f64>,
    pub generation: usize,
}

impl Population {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Fraction of samples equal to `v` (exact comparison).
    pub fn mass_at(&self, v: f64) -> f64 {
        self.samples.iter().filter(|&&s| s == v).count() as f64 / self.len() as f64
    }
}

/// Per-iteration bit error probability and conditional entropy (bits).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeTrajectory {
    pub l: usize,
    pub k: usize,
    pub channel: Channel,
    pub population: usize,
    pub seed: u64,
    pub pb: Vec<f64>,
    pub entropy: Vec<f64>,
}

/// Population-dynamics state for a regular `(l, k)` ensemble.
#[derive(Debug, Clone)]
pub struct DeRunner {
    l: usize,
    k: usize,
    channel: Channel,
    cfg: DeConfig,
    b: BSampler,
    pop_h: Vec<f64>,
    pop_u: Vec<f64>,
    generation: usize,
    stat_round: u64,
}

impl DeRunner {
    /// Standard initialization `u = 0`, hence `h = B`.
    pub fn new(l: usize, k: usize, channel: Channel, cfg: DeConfig) -> Result<Self> {
        if l < 1 || k < 2 {
            return Err(Error::InvalidParameter(format!("degrees ({l},{k}) too small")));
        }
        if cfg.population == 0 {
            return Err(Error::InvalidParameter("empty population".into()));
        }
        let b = BSampler::new(&channel)?;
        let mut r = DeRunner {
            l,
            k,
            channel,
            cfg,
            b,
            pop_h: Vec::new(),
            pop_u: vec![0.0; cfg.population],
            generation: 0,
            stat_round: 0,
        };
        r.pop_h = r.fresh_h(0);
        Ok(r)
    }

    /// Starts from `h = +∞` everywhere (the no-error fixed point's neighborhood).
    pub fn new_no_error(l: usize, k: usize, channel: Channel, cfg: DeConfig) -> Result<Self> {
        let mut r = Self::new(l, k, channel, cfg)?;
        r.pop_h = vec![f64::INFINITY; cfg.population];
        r.pop_u = vec![f64::INFINITY; cfg.population];
        Ok(r)
    }

    /// Starts from a given `h` population.
    pub fn with_h(l: usize, k: usize, channel: Channel, cfg: DeConfig, pop_h: Vec<f64>) -> Result<Self> {
        let mut r = Self::new(l, k, channel, cfg)?;
        if pop_h.len() != cfg.population {
            return Err(Error::LengthMismatch {
                expected: cfg.population,
                actual: pop_h.len(),
            });
        }
        r.pop_h = pop_h;
        Ok(r)
    }

    pub fn config(&self) -> &DeConfig {
        &self.cfg
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.l, self.k)
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn pop_h(&self) -> Population {
        Population {
            samples: self.pop_h.clone(),
            generation: self.generation,
        }
    }

    pub fn pop_u(&self) -> Population {
        Population {
            samples: self.pop_u.clone(),
            generation: self.generation,
        }
    }

    pub fn h_samples(&self) -> &[f64] {
        &self.pop_h
    }

    pub fn u_samples(&self) -> &[f64] {
        &self.pop_u
    }

    pub(crate) fn sample_b<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.b.sample(rng)
    }

    fn chunk_rng(&self, stage: u64, round: u64, chunk: usize) -> SimRng {
        derived(self.cfg.seed, &[stage, round, chunk as u64])
    }

    fn fresh_h(&self, round: u64) -> Vec<f64> {
        let mut out = vec![0.0; self.cfg.population];
        let cap = self.cfg.llr_cap;
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let mut rng = self.chunk_rng(0, round, c);
            for v in chunk {
                *v = clamp_ext(self.b.sample(&mut rng), cap);
            }
        });
        out
    }

    /// New `u` population from `pop_h` by the check-node rule on `k − 1` draws.
    pub fn check_update(&mut self) {
        self.pop_u = check_population(&self.pop_h, self.k - 1, self.cfg, 1 + 2 * self.generation as u64, self.cfg.population);
    }

    /// One generation: `u ← check(h)`, then `h ← B + Σ_{l−1} u`.
    pub fn step(&mut self) {
        self.check_update();
        let round = 2 + 2 * self.generation as u64;
        let cap = self.cfg.llr_cap;
        let l = self.l;
        let pop_u = &self.pop_u;
        let mut next = vec![0.0; self.cfg.population];
        next.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            let mut rng = self.chunk_rng(2, round, c);
            let n = pop_u.len();
            for v in chunk {
                let mut s = self.b.sample(&mut rng);
                for _ in 0..l - 1 {
                    s = add_ext(s, pop_u[rng.random_range(0..n)]);
                }
                *v = clamp_ext(s, cap);
            }
        });
        self.pop_h = next;
        self.generation += 1;
    }

    /// `(P_b, H)` from `𝒩` decision statistics `B + Σ_{l} u`.
    pub fn decision_stats(&mut self) -> (f64, f64) {
        self.stat_round += 1;
        let round = self.stat_round;
        let l = self.l;
        let pop_u = &self.pop_u;
        let n = self.cfg.population;
        let chunks: Vec<(f64, f64)> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut rng = self.chunk_rng(3, round, c);
                let len = CHUNK.min(n - c * CHUNK);
                let (mut err, mut ent) = (0.0, 0.0);
                for _ in 0..len {
                    let mut s = self.b.sample(&mut rng);
                    for _ in 0..l {
                        s = add_ext(s, pop_u[rng.random_range(0..pop_u.len())]);
                    }
                    if s < 0.0 {
                        err += 1.0;
                    } else if s == 0.0 {
                        err += 0.5;
                    }
                    ent += bit_entropy_of_llr(s);
                }
                (err, ent)
            })
            .collect();
        let (err, ent) = chunks.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        (err / n as f64, ent / n as f64)
    }
}

/// `𝔥₂(1/(1+e^{2h}))` in bits, zero at ±∞.
pub fn bit_entropy_of_llr(h: f64) -> f64 {
    if h.is_infinite() {
        return 0.0;
    }
    binary_entropy_bits(crate::llr::prob_zero(-h.abs()))
}

/// `count` samples of `atanh(Π tanh h_j)` over `fan_in` uniform draws from `pop_h`.
pub(crate) fn check_population(pop_h: &[f64], fan_in: usize, cfg: DeConfig, round: u64, count: usize) -> Vec<f64> {
    let neg: Vec<bool> = pop_h.iter().map(|&h| h < 0.0).collect();
    let lt: Vec<f64> = pop_h.par_iter().map(|&h| ln_abs_tanh(h)).collect();
    let n = pop_h.len();
    let cap = cfg.llr_cap;
    let mut out = vec![0.0; count];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let mut rng = derived(cfg.seed, &[1, round, c as u64]);
        for v in chunk {
            let mut s = 0.0;
            let mut negative = false;
            for _ in 0..fan_in {
                let j = rng.random_range(0..n);
                s += lt[j];
                negative ^= neg[j];
            }
            let mag = atanh_of_exp(s);
            *v = clamp_ext(if negative { -mag } else { mag }, cap);
        }
    });
    out
}

/// Runs `iterations` generations from `u = 0`. Entry `t` of the trajectory
/// uses `u^{(t−1)}`; entry 0 is the raw channel decision.
pub fn run_de(l: usize, k: usize, channel: Channel, iterations: usize, cfg: DeConfig) -> Result<DeTrajectory> {
    if cfg.population < 1000 {
        return Err(Error::InvalidParameter("population must be at least 1000".into()));
    }
    let mut r = DeRunner::new(l, k, channel, cfg)?;
    let mut pb = Vec::with_capacity(iterations + 1);
    let mut entropy = Vec::with_capacity(iterations + 1);
    let (p0, h0) = r.decision_stats();
    pb.push(p0);
    entropy.push(h0);
    for _ in 0..iterations {
        r.step();
        let (p, h) = r.decision_stats();
        pb.push(p);
        entropy.push(h);
    }
    Ok(DeTrajectory {
        l,
        k,
        channel,
        population: cfg.population,
        seed: cfg.seed,
        pb,
        entropy,
    })
}

/// Outcome of classifying one channel parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub param: f64,
    pub success: bool,
    pub iterations: usize,
    pub final_pb: f64,
}

/// Runs DE until `P_b < floor` (success) or `max_iter` generations elapse.
pub fn classify(l: usize, k: usize, channel: Channel, cfg: DeConfig) -> Result<Probe> {
    let mut r = DeRunner::new(l, k, channel, cfg)?;
    let (mut pb, _) = r.decision_stats();
    let mut t = 0;
    while pb >= cfg.floor && t < cfg.max_iter {
        r.step();
        t += 1;
        pb = r.decision_stats().0;
    }
    Ok(Probe {
        param: channel.param(),
        success: pb < cfg.floor,
        iterations: t,
        final_pb: pb,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    /// Largest parameter classified as success.
    pub lo: f64,
    /// Smallest parameter classified as failure.
    pub hi: f64,
    pub probes: Vec<Probe>,
}

impl ThresholdEstimate {
    pub fn estimate(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn resolution(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

/// Initial bracket: the capacity-equals-rate point bounds any threshold.
pub(crate) fn initial_bracket(l: usize, k: usize, kind: ChannelKind) -> (f64, f64) {
    let load = l as f64 / k as f64;
    match kind {
        ChannelKind::Bsc => (0.0, (inverse_binary_entropy(load, 1e-12) + 0.005).min(0.5)),
        ChannelKind::Bec => (0.0, (load + 0.005).min(1.0)),
        other => other.param_range(),
    }
}

/// Bisection on the channel parameter using [`classify`] with a common seed.
pub fn bp_threshold(l: usize, k: usize, kind: ChannelKind, tol: f64, cfg: DeConfig) -> Result<ThresholdEstimate> {
    bisect_threshold(initial_bracket(l, k, kind), tol, |p| classify(l, k, kind.with_param(p), cfg))
}

pub(crate) fn bisect_threshold<F>(bracket: (f64, f64), tol: f64, mut probe: F) -> Result<ThresholdEstimate>
where
    F: FnMut(f64) -> Result<Probe>,
{
    let (mut lo, mut hi) = bracket;
    let mut probes = Vec::new();
    let top = probe(hi)?;
    probes.push(top);
    if top.success {
        return Err(Error::RootFinding(format!("upper end {hi} classified as success")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let p = probe(mid)?;
        probes.push(p);
        if p.success {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdEstimate { lo, hi, probes })
}

/// `x_{t+1} = ε(1 − (1 − x_t)^{k−1})^{l−1}` from `x_0 = ε`.
pub fn bec_de(eps: f64, l: usize, k: usize, iterations: usize) -> Vec<f64> {
    let mut xs = Vec::with_capacity(iterations + 1);
    let mut x = eps;
    xs.push(x);
    for _ in 0..iterations {
        x = eps * (1.0 - (1.0 - x).powi(k as i32 - 1)).powi(l as i32 - 1);
        xs.push(x);
    }
    xs
}

/// Whether the BEC recursion at `eps` has a fixed point in `(0, eps]`,
/// i.e. `f(x) ≥ x` somewhere on a fine grid.
fn bec_has_positive_fixed_point(eps: f64, l: usize, k: usize) -> bool {
    const GRID: usize = 200_000;
    (1..=GRID).any(|j| {
        let x = eps * j as f64 / GRID as f64;
        eps * (1.0 - (1.0 - x).powi(k as i32 - 1)).powi(l as i32 - 1) >= x
    })
}

/// BEC threshold by bisection on the existence of a positive fixed point.
pub fn bec_threshold(l: usize, k: usize, tol: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if bec_has_positive_fixed_point(mid, l, k) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

impl DeTrajectory {
    /// CSV with header `t,pb,entropy`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,pb,entropy\n");
        for (t, (p, h)) in self.pb.iter().zip(&self.entropy).enumerate() {
            s.push_str(&format!("{t},{p},{h}\n"));
        }
        s
    }
}

/// Derived seed for the `i`-th probe of a sweep; exposed for reproducible scripts.
pub fn probe_seed(master: u64, i: u64) -> u64 {
    derive_seed(master, &[0xDE, i])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> DeConfig {
        DeConfig {
            population: 20_000,
            max_iter: 200,
            seed,
            ..DeConfig::default()
        }
    }

    #[test]
    fn bec_scalar_endpoints() {
        assert!(bec_de(0.0, 3, 6, 50).iter().all(|&x| x == 0.0));
        assert!(bec_de(1.0, 3, 6, 50).iter().all(|&x| x == 1.0));
    }

    #[test]
    fn bec_threshold_value() {
        let t = bec_threshold(3, 6, 1e-6);
        assert!((t - 0.42944).abs() < 2e-5, "{t}");
        // Cross-check: min_x x / (1-(1-x)^5)^2.
        let direct = (1..1_000_000)
            .map(|j| {
                let x = j as f64 / 1e6;
                x / (1.0 - (1.0 - x).powi(5)).powi(2)
            })
            .fold(f64::INFINITY, f64::min);
        assert!((t - direct).abs() < 2e-6);
    }

    #[test]
    fn bec_populations_stay_two_valued() {
        let mut r = DeRunner::new(3, 6, Channel::Bec(0.45), small(3)).unwrap();
        for _ in 0..20 {
            r.step();
            assert!(r.h_samples().iter().all(|&h| h == 0.0 || h == f64::INFINITY));
            assert!(r.u_samples().iter().all(|&u| u == 0.0 || u == f64::INFINITY));
        }
    }

    #[test]
    fn noiseless_channel_gives_infinite_messages() {
        let mut r = DeRunner::new(3, 6, Channel::Bsc(0.0), small(4)).unwrap();
        r.step();
        assert!(r.h_samples().iter().all(|&h| h == f64::INFINITY));
    }

    #[test]
    fn initial_error_is_channel_error() {
        let t = run_de(3, 6, Channel::Bsc(0.07), 0, small(5)).unwrap();
        let sigma = (0.07f64 * 0.93 / 20_000.0).sqrt();
        assert!((t.pb[0] - 0.07).abs() < 3.0 * sigma);
    }

    #[test]
    fn seed_determinism() {
        let a = run_de(3, 6, Channel::Bsc(0.07), 5, small(6)).unwrap();
        let b = run_de(3, 6, Channel::Bsc(0.07), 5, small(6)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_header() {
        let t = run_de(3, 6, Channel::Bsc(0.05), 1, small(7)).unwrap();
        assert!(t.to_csv().starts_with("t,pb,entropy\n0,"));
    }
}
