//! Binary-input memoryless channels.
//!
//! Supported families: BSC(p), BEC(ε), the Z channel ZC(p) and the
//! binary-input AWGN channel with noise deviation σ. For the Z channel input
//! `0` is transmitted noiselessly and input `1` is flipped with probability
//! `p`. AWGN inputs are mapped `0 → +1`, `1 → −1`.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::binary_entropy_bits;
use crate::llr::Llr;

/// Absolute tolerance for the AWGN capacity integral.
pub const AWGN_QUADRATURE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "lowercase")]
pub enum Channel {
    /// Binary symmetric channel with crossover probability.
    Bsc(f64),
    /// Binary erasure channel with erasure probability.
    Bec(f64),
    /// Z channel; input 1 flips to 0 with the given probability.
    #[serde(rename = "zc")]
    Z(f64),
    /// Binary-input AWGN with noise standard deviation.
    Awgn(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Output {
    Bit(u8),
    Erasure,
    Real(f64),
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::Bit(b) => write!(f, "{b}"),
            Output::Erasure => write!(f, "*"),
            Output::Real(v) => write!(f, "{v}"),
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::Bsc(p) => write!(f, "BSC({p})"),
            Channel::Bec(e) => write!(f, "BEC({e})"),
            Channel::Z(p) => write!(f, "ZC({p})"),
            Channel::Awgn(s) => write!(f, "AWGN({s})"),
        }
    }
}

/// The channel family a scalar parameter indexes; used by threshold searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Bsc,
    Bec,
    #[serde(rename = "zc")]
    Z,
    Awgn,
}

impl ChannelKind {
    pub fn with_param(self, param: f64) -> Channel {
        match self {
            ChannelKind::Bsc => Channel::Bsc(param),
            ChannelKind::Bec => Channel::Bec(param),
            ChannelKind::Z => Channel::Z(param),
            ChannelKind::Awgn => Channel::Awgn(param),
        }
    }

    /// Natural search interval for the parameter.
    pub fn param_range(self) -> (f64, f64) {
        match self {
            ChannelKind::Bsc => (0.0, 0.5),
            ChannelKind::Bec | ChannelKind::Z => (0.0, 1.0),
            ChannelKind::Awgn => (1e-3, 5.0),
        }
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bsc" => Ok(ChannelKind::Bsc),
            "bec" => Ok(ChannelKind::Bec),
            "zc" | "z" => Ok(ChannelKind::Z),
            "awgn" | "biawgn" => Ok(ChannelKind::Awgn),
            other => Err(Error::InvalidParameter(format!("unknown channel kind '{other}'"))),
        }
    }
}

impl Channel {
    pub fn kind(&self) -> ChannelKind {
        match self {
            Channel::Bsc(_) => ChannelKind::Bsc,
            Channel::Bec(_) => ChannelKind::Bec,
            Channel::Z(_) => ChannelKind::Z,
            Channel::Awgn(_) => ChannelKind::Awgn,
        }
    }

    pub fn param(&self) -> f64 {
        match *self {
            Channel::Bsc(p) | Channel::Bec(p) | Channel::Z(p) | Channel::Awgn(p) => p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Channel::Bsc(p) | Channel::Bec(p) | Channel::Z(p) => (0.0..=1.0).contains(&p),
            Channel::Awgn(s) => s > 0.0 && s.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{self}: parameter out of range")))
        }
    }

    /// Whether `Q(y|0) = Q(ι(y)|1)` holds for an involution `ι` of the output alphabet.
    pub fn is_symmetric(&self) -> bool {
        !matches!(self, Channel::Z(_))
    }

    /// Whether the outputs are plain bits (usable by hard-decision decoders).
    pub fn has_binary_output(&self) -> bool {
        matches!(self, Channel::Bsc(_) | Channel::Z(_))
    }

    /// `Q(y|x)`; a density for AWGN.
    pub fn transition_prob(&self, x: u8, y: Output) -> Result<f64> {
        let x = x & 1;
        match (*self, y) {
            (Channel::Bsc(p), Output::Bit(b)) => Ok(if b & 1 == x { 1.0 - p } else { p }),
            (Channel::Bec(e), Output::Erasure) => Ok(e),
            (Channel::Bec(e), Output::Bit(b)) => Ok(if b & 1 == x { 1.0 - e } else { 0.0 }),
            (Channel::Z(p), Output::Bit(b)) => Ok(match (x, b & 1) {
                (0, 0) => 1.0,
                (0, _) => 0.0,
                (_, 1) => 1.0 - p,
                _ => p,
            }),
            (Channel::Awgn(s), Output::Real(v)) => {
                let mean = bpsk(x);
                Ok((-(v - mean).powi(2) / (2.0 * s * s)).exp() / (2.0 * PI * s * s).sqrt())
            }
            (ch, y) => Err(Error::AlphabetMismatch {
                channel: ch.to_string(),
                symbol: y.to_string(),
            }),
        }
    }

    pub fn sample_output<R: Rng + ?Sized>(&self, x: u8, rng: &mut R) -> Output {
        let x = x & 1;
        match *self {
            Channel::Bsc(p) => Output::Bit(if rng.random::<f64>() < p { x ^ 1 } else { x }),
            Channel::Bec(e) => {
                if rng.random::<f64>() < e {
                    Output::Erasure
                } else {
                    Output::Bit(x)
                }
            }
            Channel::Z(p) => {
                if x == 1 && rng.random::<f64>() < p {
                    Output::Bit(0)
                } else {
                    Output::Bit(x)
                }
            }
            Channel::Awgn(s) => {
                let z: f64 = StandardNormal.sample(rng);
                Output::Real(bpsk(x) + s * z)
            }
        }
    }

    pub fn transmit<R: Rng + ?Sized>(&self, word: &[u8], rng: &mut R) -> Vec<Output> {
        word.iter().map(|&x| self.sample_output(x, rng)).collect()
    }

    /// Half log-likelihood `½ ln(Q(y|0)/Q(y|1))`, infinities allowed.
    pub fn llr(&self, y: Output) -> Result<Llr> {
        if let (Channel::Awgn(s), Output::Real(v)) = (*self, y) {
            return Ok(Llr(v / (s * s)));
        }
        let q0 = self.transition_prob(0, y)?;
        let q1 = self.transition_prob(1, y)?;
        Ok(Llr(half_log_ratio(q0, q1)))
    }

    pub fn llrs(&self, ys: &[Output]) -> Result<Vec<Llr>> {
        ys.iter().map(|&y| self.llr(y)).collect()
    }

    /// Capacity in bits per channel use.
    pub fn capacity(&self) -> Result<f64> {
        self.validate()?;
        match *self {
            Channel::Bsc(p) => Ok(1.0 - binary_entropy_bits(p)),
            Channel::Bec(e) => Ok(1.0 - e),
            Channel::Z(p) => Ok(z_capacity(p)),
            Channel::Awgn(s) => awgn_capacity(s),
        }
    }

    /// Mutual information with uniform inputs, in bits.
    pub fn uniform_input_rate(&self) -> Result<f64> {
        match *self {
            Channel::Z(p) => {
                self.validate()?;
                Ok(z_rate(0.5, p))
            }
            _ => self.capacity(),
        }
    }
}

fn bpsk(x: u8) -> f64 {
    if x == 0 {
        1.0
    } else {
        -1.0
    }
}

fn half_log_ratio(q0: f64, q1: f64) -> f64 {
    match (q0 == 0.0, q1 == 0.0) {
        (true, true) => 0.0,
        (false, true) => f64::INFINITY,
        (true, false) => f64::NEG_INFINITY,
        (false, false) => 0.5 * (q0 / q1).ln(),
    }
}

/// `I_α = h(α p̄) − α h(p)` for the Z channel, where `α` is the probability
/// of sending the noisy input. Bits.
pub fn z_rate(alpha: f64, p: f64) -> f64 {
    binary_entropy_bits(alpha * (1.0 - p)) - alpha * binary_entropy_bits(p)
}

/// Capacity-achieving probability of the noisy input: `p^{p/p̄} / (1 + p̄ p^{p/p̄})`.
pub fn z_optimal_alpha(p: f64) -> f64 {
    if p <= 0.0 {
        return 0.5;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let pb = 1.0 - p;
    let t = (p / pb * p.ln()).exp();
    t / (1.0 + pb * t)
}

pub fn z_capacity(p: f64) -> f64 {
    if p >= 1.0 {
        return 0.0;
    }
    z_rate(z_optimal_alpha(p), p)
}

fn awgn_capacity(sigma: f64) -> Result<f64> {
    let s2 = sigma * sigma;
    // C = 1 − E_{y~N(1,σ²)} log2(1 + e^{−2y/σ²})
    let integrand = |y: f64| {
        let dens = (-(y - 1.0).powi(2) / (2.0 * s2)).exp() / (2.0 * PI * s2).sqrt();
        dens * crate::llr::softplus(-2.0 * y / s2) / LN_2
    };
    let (integral, err) = gaussian_panels(integrand, 1.0, sigma);
    if err > AWGN_QUADRATURE_TOL {
        return Err(Error::Quadrature {
            achieved: err,
            requested: AWGN_QUADRATURE_TOL,
        });
    }
    Ok(1.0 - integral)
}

/// Integrates against a Gaussian bump centred at `mean` by summing
/// σ-wide panels over `mean ± 14σ`. Returns (value, error estimate).
pub(crate) fn gaussian_panels<F: Fn(f64) -> f64>(f: F, mean: f64, sigma: f64) -> (f64, f64) {
    let panels = 28;
    let mut total = 0.0;
    let mut err = 0.0;
    for i in 0..panels {
        let a = mean + sigma * (i as f64 - 14.0);
        let out = quadrature::integrate(&f, a, a + sigma, AWGN_QUADRATURE_TOL / panels as f64);
        total += out.integral;
        err += out.error_estimate;
    }
    (total, err)
}
