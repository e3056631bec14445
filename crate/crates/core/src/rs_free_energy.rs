//! Replica-symmetric (Bethe) free-energy functional on density-evolution
//! fixed points, conditional-entropy estimates and MAP thresholds.
//!
//! The functional, in bits, for a regular `(l, k)` ensemble is
//!
//! ```text
//! φ = −l·E log₂[(1 + tanh u·tanh h)/2]
//!     + E[−Σ_{i≤l} log₂(1 + e^{−2u_i}) + log₂(1 + e^{−2(B + Σ u_i)})]
//!     + (l/k)·E log₂[(1 + Π_{i≤k} tanh h_i)/2]
//! ```
//!
//! with `B` the channel log-likelihood under input 0.

use std::f64::consts::LN_2;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{Channel, ChannelKind};
use crate::density_evolution::{check_population, initial_bracket, DeConfig, DeRunner};
use crate::error::{Error, Result};
use crate::llr::{ln_abs_tanh, ln_cosh, softplus, DEFAULT_LLR_CAP};
use crate::rng::derived;

/// Number of CDF bins over `[−cap, cap]` in the fixed-point residual.
pub const RESIDUAL_BINS: usize = 512;

/// Nominal tolerance on the CDF residual; raised to the sampling noise floor
/// of the population (see [`residual_tolerance`]).
pub const RESIDUAL_TOL: f64 = 3e-3;

const BLOCK: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsConfig {
    pub de: DeConfig,
    /// Monte Carlo samples for the functional.
    pub samples: usize,
    /// Generations run before the residual is consulted.
    pub min_iter: usize,
}

impl Default for RsConfig {
    fn default() -> Self {
        RsConfig {
            de: DeConfig::default(),
            samples: 2_000_000,
            min_iter: 20,
        }
    }
}

/// Functional value with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsValue {
    /// `φ` in bits.
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Populations at an approximate fixed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointPair {
    pub pop_u: Vec<f64>,
    pub pop_h: Vec<f64>,
    /// CDF distance between the last two `h` generations.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Residual tolerance: the larger of [`RESIDUAL_TOL`] and 1.5× the typical
/// two-sample CDF distance `√(2/𝒩)`.
pub fn residual_tolerance(population: usize) -> f64 {
    RESIDUAL_TOL.max(1.5 * (2.0 / population as f64).sqrt())
}

fn cdf_signature(pop: &[f64], cap: f64) -> Vec<f64> {
    // Bins: [−∞ atom] + RESIDUAL_BINS finite bins + [+∞ atom].
    let mut counts = vec![0usize; RESIDUAL_BINS + 2];
    let width = 2.0 * cap / RESIDUAL_BINS as f64;
    for &v in pop {
        let idx = if v == f64::NEG_INFINITY {
            0
        } else if v == f64::INFINITY {
            RESIDUAL_BINS + 1
        } else {
            1 + (((v + cap) / width) as usize).min(RESIDUAL_BINS - 1)
        };
        counts[idx] += 1;
    }
    let n = pop.len() as f64;
    let mut acc = 0usize;
    counts
        .iter()
        .map(|&c| {
            acc += c;
            acc as f64 / n
        })
        .collect()
}

/// Max absolute difference between the binned empirical CDFs of two populations.
pub fn cdf_distance(a: &[f64], b: &[f64], cap: f64) -> f64 {
    cdf_signature(a, cap)
        .iter()
        .zip(cdf_signature(b, cap))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Iterates DE until the `h` residual drops below [`residual_tolerance`]
/// (after at least `min_iter` generations) or `max_iter` is reached, then
/// regenerates `u` from the final `h`.
pub fn run_to_fixed_point(mut runner: DeRunner, min_iter: usize) -> FixedPointPair {
    let cfg = *runner.config();
    let tol = residual_tolerance(cfg.population);
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let before = runner.h_samples().to_vec();
        runner.step();
        iterations += 1;
        residual = cdf_distance(&before, runner.h_samples(), cfg.llr_cap);
        if iterations >= min_iter && residual <= tol {
            break;
        }
        if runner.h_samples().iter().all(|&h| h >= cfg.llr_cap) {
            residual = 0.0;
            break;
        }
    }
    let (_, k) = runner.degrees();
    let pop_h = runner.h_samples().to_vec();
    let pop_u = check_population(&pop_h, k - 1, cfg, 0xF1F0 + iterations as u64, cfg.population);
    FixedPointPair {
        pop_u,
        pop_h,
        residual,
        iterations,
        converged: residual <= tol,
    }
}

/// `ln[(1 + tanh u·tanh h)/2]`.
fn ln_pair_overlap(u: f64, h: f64) -> f64 {
    match (u.is_infinite(), h.is_infinite()) {
        (true, true) => {
            if (u > 0.0) == (h > 0.0) {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
        (true, false) => -softplus(-2.0 * h * u.signum()),
        (false, true) => -softplus(-2.0 * u * h.signum()),
        (false, false) => ln_cosh(u + h) - ln_cosh(u) - ln_cosh(h) - LN_2,
    }
}

/// `ln[(1 + Π tanh h_i)/2]` in sign/log-magnitude form.
fn ln_parity_even(hs: impl Iterator<Item = f64>) -> f64 {
    let mut s = 0.0;
    let mut negative = false;
    for h in hs {
        s += ln_abs_tanh(h);
        negative ^= h < 0.0;
    }
    if s == f64::NEG_INFINITY {
        return -LN_2;
    }
    if negative {
        (-s.exp_m1()).ln() - LN_2
    } else {
        softplus(s) - LN_2
    }
}

fn add_ext(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_nan() {
        0.0
    } else {
        s
    }
}

/// Monte Carlo estimate of `φ` from independent draws out of the two populations.
pub fn phi_functional(
    pair: &FixedPointPair,
    l: usize,
    k: usize,
    runner_for_channel: &DeRunner,
    samples: usize,
    seed: u64,
) -> Result<RsValue> {
    if samples < 2 || pair.pop_u.is_empty() || pair.pop_h.is_empty() {
        return Err(Error::InvalidParameter("need at least two samples and non-empty populations".into()));
    }
    // Saturated values stand for certainty.
    let cap = runner_for_channel.config().llr_cap;
    let certain = |v: f64| {
        if v >= cap {
            f64::INFINITY
        } else if v <= -cap {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let pu: Vec<f64> = pair.pop_u.iter().map(|&v| certain(v)).collect();
    let ph: Vec<f64> = pair.pop_h.iter().map(|&v| certain(v)).collect();
    let (pu, ph) = (&pu, &ph);
    let lf = l as f64;
    let ratio = l as f64 / k as f64;
    let blocks: Vec<(f64, f64)> = (0..samples.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let mut rng = derived(seed, &[0x9F, b as u64]);
            let len = BLOCK.min(samples - b * BLOCK);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                // Variable-edge term.
                let u = pu[rng.random_range(0..pu.len())];
                let h = ph[rng.random_range(0..ph.len())];
                let t1 = -lf * ln_pair_overlap(u, h);
                // Variable-node term.
                let bch = runner_for_channel.sample_b(&mut rng);
                let mut total = bch;
                let mut t2 = 0.0;
                for _ in 0..l {
                    let ui = pu[rng.random_range(0..pu.len())];
                    t2 -= softplus(-2.0 * ui);
                    total = add_ext(total, ui);
                }
                t2 += softplus(-2.0 * total);
                // Check-node term.
                let t3 = ratio * ln_parity_even((0..k).map(|_| ph[rng.random_range(0..ph.len())]));
                let x = (t1 + t2 + t3) / LN_2;
                s1 += x;
                s2 += x * x;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = blocks.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = s1 / n;
    if !mean.is_finite() {
        return Err(Error::Degenerate("functional diverged: contradictory messages in the populations".into()));
    }
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok(RsValue {
        value: mean,
        std_error: (var / n).sqrt(),
        samples,
    })
}

/// Closed form of `φ` for erasure-type populations: `x = P(h = 0)`,
/// `y = P(u = 0)`, all other mass at `+∞`.
pub fn bec_phi(eps: f64, l: usize, k: usize, x: f64, y: f64) -> f64 {
    let lf = l as f64;
    lf * (1.0 - (1.0 - x) * (1.0 - y)) - lf * y + eps * y.powi(l as i32)
        - lf / k as f64 * (1.0 - (1.0 - x).powi(k as i32))
}

/// BEC fixed-point value of `φ` reached by the scalar recursion from `x = ε`.
pub fn bec_phi_at_fixed_point(eps: f64, l: usize, k: usize, iterations: usize) -> f64 {
    let xs = crate::density_evolution::bec_de(eps, l, k, iterations);
    let x = *xs.last().expect("non-empty");
    let y = 1.0 - (1.0 - x).powi(k as i32 - 1);
    bec_phi(eps, l, k, x, y)
}

/// DE initialization for [`conditional_entropy_rs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    NoError,
    ZeroLlr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    /// `max` over the initializations, in bits per bit.
    pub value: RsValue,
    pub per_init: Vec<(Init, RsValue, FixedPointPair)>,
}

/// Evaluates `φ` on the fixed point reached from `init`.
pub fn phi_from_init(l: usize, k: usize, channel: Channel, init: Init, cfg: &RsConfig) -> Result<(RsValue, FixedPointPair)> {
    let runner = match init {
        Init::NoError => DeRunner::new_no_error(l, k, channel, cfg.de)?,
        Init::ZeroLlr => DeRunner::new(l, k, channel, cfg.de)?,
    };
    let pair = match init {
        Init::NoError => FixedPointPair {
            pop_u: runner.u_samples().to_vec(),
            pop_h: runner.h_samples().to_vec(),
            residual: 0.0,
            iterations: 0,
            converged: true,
        },
        Init::ZeroLlr => run_to_fixed_point(runner.clone(), cfg.min_iter),
    };
    let v = phi_functional(&pair, l, k, &runner, cfg.samples, cfg.de.seed ^ 0x5EED)?;
    Ok((v, pair))
}

/// RS estimate of the conditional entropy per bit: the larger `φ` over the
/// no-error and zero-LLR initializations.
pub fn conditional_entropy_rs(l: usize, k: usize, channel: Channel, cfg: &RsConfig) -> Result<EntropyEstimate> {
    let mut per_init = Vec::new();
    for init in [Init::NoError, Init::ZeroLlr] {
        let (v, pair) = phi_from_init(l, k, channel, init, cfg)?;
        per_init.push((init, v, pair));
    }
    let best = per_init
        .iter()
        .map(|p| p.1)
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .expect("two initializations");
    Ok(EntropyEstimate { value: best, per_init })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapThreshold {
    pub lo: f64,
    pub hi: f64,
    pub probes: Vec<(f64, RsValue)>,
}

impl MapThreshold {
    pub fn estimate(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn resolution(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

/// Bisection on the sign of `φ` at the zero-LLR fixed point: positive means
/// the parameter lies above the MAP threshold.
pub fn map_threshold(l: usize, k: usize, kind: ChannelKind, tol: f64, cfg: &RsConfig) -> Result<MapThreshold> {
    let (mut lo, mut hi) = initial_bracket(l, k, kind);
    let mut probes = Vec::new();
    let mut phi_at = |p: f64| -> Result<RsValue> {
        let (v, _) = phi_from_init(l, k, kind.with_param(p), Init::ZeroLlr, cfg)?;
        probes.push((p, v));
        Ok(v)
    };
    if phi_at(hi)?.value <= 0.0 {
        return Err(Error::RootFinding(format!("φ not positive at the upper end {hi}")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if phi_at(mid)?.value > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(MapThreshold { lo, hi, probes })
}

/// `p_d ≤ p_c` up to the combined bisection resolutions.
pub fn ordering_holds(bp: &crate::density_evolution::ThresholdEstimate, map: &MapThreshold) -> bool {
    bp.estimate() <= map.estimate() + bp.resolution() + map.resolution()
}

/// Exact `H(X|Y)/N` in bits for a uniformly drawn codeword, by enumerating
/// all output words with positive probability under the all-zero input.
/// Supports BSC, BEC and Z channels with `N ≤ 16`.
pub fn exact_conditional_entropy(h: &crate::codes::ParityCheckMatrix, channel: &Channel) -> Result<f64> {
    use crate::channels::Output;
    let n = h.n();
    if n > 16 {
        return Err(Error::CodeTooLarge { dimension: n, limit: 16 });
    }
    let code = h.codeword_sampler().enumerate(16)?;
    let alphabet: Vec<Output> = match channel {
        Channel::Bsc(_) | Channel::Z(_) => vec![Output::Bit(0), Output::Bit(1)],
        Channel::Bec(_) => vec![Output::Bit(0), Output::Erasure, Output::Bit(1)],
        Channel::Awgn(_) => return Err(Error::InvalidParameter("continuous output".into())),
    };
    let q: Vec<[f64; 2]> = alphabet
        .iter()
        .map(|&y| Ok([channel.transition_prob(0, y)?, channel.transition_prob(1, y)?]))
        .collect::<Result<_>>()?;
    let a = alphabet.len();
    let total_words = a.pow(n as u32);
    let mut ys = vec![0usize; n];
    let mut entropy = 0.0;
    // Average over transmitted codewords is needed for asymmetric channels.
    for word in 0..total_words {
        let mut w = word;
        for y in ys.iter_mut() {
            *y = w % a;
            w /= a;
        }
        let lik: Vec<f64> = code
            .iter()
            .map(|c| ys.iter().zip(c).map(|(&y, &b)| q[y][b as usize]).product())
            .collect();
        let p_y: f64 = lik.iter().sum::<f64>() / code.len() as f64;
        if p_y == 0.0 {
            continue;
        }
        let z: f64 = lik.iter().sum();
        let h_post: f64 = lik
            .iter()
            .filter(|&&v| v > 0.0)
            .map(|&v| {
                let p = v / z;
                -p * p.log2()
            })
            .sum();
        entropy += p_y * h_post;
    }
    Ok(entropy / n as f64)
}

/// Default configuration with a custom population size and seed.
pub fn rs_config(population: usize, samples: usize, seed: u64) -> RsConfig {
    RsConfig {
        de: DeConfig {
            population,
            seed,
            llr_cap: DEFAULT_LLR_CAP,
            ..DeConfig::default()
        },
        samples,
        ..RsConfig::default()
    }
}
