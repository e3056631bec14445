//! Finite-length Monte Carlo experiments, scaling-law fits and result files.

use std::path::Path;

use rayon::prelude::*;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF, Normal};

use crate::channels::{Channel, ChannelKind, Output};
use crate::codes::{sample_regular, ParityCheckMatrix, RegularEnsemble, TannerGraph};
use crate::decoders::{bit_flip_decode, bp_decode_with, unsat_count, BpConfig, DecodeResult};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, derived};

/// Trials between stopping-rule checks.
pub const BATCH: usize = 50;
/// Below this many errors the exact binomial interval is used.
pub const NORMAL_CI_MIN_ERRORS: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Bp,
    Flip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodewordPolicy {
    AllZero,
    Random,
}

fn default_min_block_errors() -> u64 {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub l: usize,
    pub k: usize,
    pub n: Vec<usize>,
    pub channel: ChannelKind,
    pub params: Vec<f64>,
    pub decoder: DecoderKind,
    pub trials: usize,
    /// BP iterations, or flips for the flip decoder. Defaults: 200 and `N`.
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    pub codeword: CodewordPolicy,
    /// Stop a point once this many block errors are seen; 0 disables.
    #[serde(default = "default_min_block_errors")]
    pub min_block_errors: u64,
    /// One code per blocklength instead of a fresh draw per trial.
    #[serde(default)]
    pub fixed_code: bool,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| Error::format(path, e))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() || self.params.is_empty() || self.trials == 0 {
            return Err(Error::Config("n, params and trials must be non-empty".into()));
        }
        for &n in &self.n {
            RegularEnsemble::new(self.l, self.k, n)?;
        }
        for &p in &self.params {
            self.channel.with_param(p).validate()?;
        }
        let probe = self.channel.with_param(self.params[0]);
        if self.codeword == CodewordPolicy::AllZero && !probe.is_symmetric() {
            return Err(Error::Config("the all-zero codeword policy requires a symmetric channel".into()));
        }
        if self.decoder == DecoderKind::Flip && !probe.has_binary_output() {
            return Err(Error::Config("the flip decoder needs a binary-output channel".into()));
        }
        Ok(())
    }

    fn iteration_cap(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(match self.decoder {
            DecoderKind::Bp => 200,
            DecoderKind::Flip => n,
        })
    }
}

/// Zero-fraction statistics of the transmitted codewords.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeStats {
    pub mean_zero_fraction: f64,
    /// Fraction of draws with `|τ − ½| ≤ 5/√N`.
    pub concentrated_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateRecord {
    pub n: usize,
    pub param: f64,
    pub pb: f64,
    pub pb_ci: f64,
    #[serde(rename = "pB")]
    pub p_block: f64,
    #[serde(rename = "pB_ci")]
    pub p_block_ci: f64,
    pub trials: u64,
    pub avg_iters: f64,
    pub bit_errors: u64,
    pub block_errors: u64,
    /// Mean unsatisfied checks left by the flip decoder.
    pub residual_unsat: Option<f64>,
    pub codeword_types: Option<TypeStats>,
}

/// The fixed CSV columns of an [`ErrorRateRecord`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRateRow {
    pub n: usize,
    pub param: f64,
    pub pb: f64,
    pub pb_ci: f64,
    #[serde(rename = "pB")]
    pub p_block: f64,
    #[serde(rename = "pB_ci")]
    pub p_block_ci: f64,
    pub trials: u64,
    pub avg_iters: f64,
}

pub const CSV_HEADER: &str = "n,param,pb,pb_ci,pB,pB_ci,trials,avg_iters";

impl From<&ErrorRateRecord> for ErrorRateRow {
    fn from(r: &ErrorRateRecord) -> Self {
        ErrorRateRow {
            n: r.n,
            param: r.param,
            pb: r.pb,
            pb_ci: r.pb_ci,
            p_block: r.p_block,
            p_block_ci: r.p_block_ci,
            trials: r.trials,
            avg_iters: r.avg_iters,
        }
    }
}

/// 95% half-width: normal approximation, or Clopper–Pearson below
/// [`NORMAL_CI_MIN_ERRORS`] errors.
pub fn confidence_half_width(errors: u64, total: u64) -> f64 {
    if total == 0 {
        return f64::NAN;
    }
    let n = total as f64;
    let p = errors as f64 / n;
    if errors >= NORMAL_CI_MIN_ERRORS {
        return 1.959963984540054 * (p * (1.0 - p) / n).sqrt();
    }
    let lo = if errors == 0 {
        0.0
    } else {
        Beta::new(errors as f64, (total - errors + 1) as f64).map_or(0.0, |b| b.inverse_cdf(0.025))
    };
    let hi = if errors == total {
        1.0
    } else {
        Beta::new((errors + 1) as f64, (total - errors) as f64).map_or(1.0, |b| b.inverse_cdf(0.975))
    };
    0.5 * (hi - lo)
}

#[derive(Debug, Clone, Default)]
struct Tally {
    trials: u64,
    bit_errors: u64,
    block_errors: u64,
    iterations: u64,
    residual: u64,
    zero_fraction: f64,
    concentrated: u64,
}

struct TrialOutcome {
    bit_errors: u64,
    iterations: u64,
    residual: u64,
    zero_fraction: f64,
}

fn run_trial(cfg: &ExperimentConfig, channel: &Channel, ens: &RegularEnsemble, fixed: Option<&(TannerGraph, ParityCheckMatrix)>, seed: u64) -> Result<TrialOutcome> {
    let mut rng = crate::rng::seeded(seed);
    let owned;
    let (graph, pcm): (&TannerGraph, Option<&ParityCheckMatrix>) = match fixed {
        Some((g, h)) => (g, Some(h)),
        None => {
            owned = sample_regular(ens, &mut rng)?;
            (&owned, None)
        }
    };
    let n = graph.n();
    let x = match cfg.codeword {
        CodewordPolicy::AllZero => vec![0u8; n],
        CodewordPolicy::Random => match pcm {
            Some(h) => h.sample_codeword(&mut rng),
            None => ParityCheckMatrix::from_graph(graph).sample_codeword(&mut rng),
        },
    };
    let y = channel.transmit(&x, &mut rng);
    let cap = cfg.iteration_cap(n);
    let res: DecodeResult = match cfg.decoder {
        DecoderKind::Bp => {
            let llrs: Vec<f64> = channel.llrs(&y)?.into_iter().map(|l| l.0).collect();
            let bp = BpConfig {
                max_iter: cap,
                ..BpConfig::default()
            };
            bp_decode_with(graph, &llrs, &bp, None, &mut rng)?
        }
        DecoderKind::Flip => {
            let bits: Vec<u8> = y
                .iter()
                .map(|o| match o {
                    Output::Bit(b) => Ok(*b),
                    other => Err(Error::AlphabetMismatch {
                        channel: channel.to_string(),
                        symbol: other.to_string(),
                    }),
                })
                .collect::<Result<_>>()?;
            bit_flip_decode(graph, &bits, cap, None, &mut rng)?
        }
    };
    let residual = match cfg.decoder {
        DecoderKind::Flip => unsat_count(graph, &res.estimate)? as u64,
        DecoderKind::Bp => 0,
    };
    Ok(TrialOutcome {
        bit_errors: res.bit_errors(&x) as u64,
        iterations: res.iterations as u64,
        residual,
        zero_fraction: x.iter().filter(|&&b| b == 0).count() as f64 / n as f64,
    })
}

/// One record per `(N, param)`; per-trial seeds derive from `(seed, N index, param index, trial)`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ErrorRateRecord>> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.n.len() * cfg.params.len());
    for (ni, &n) in cfg.n.iter().enumerate() {
        let ens = RegularEnsemble::new(cfg.l, cfg.k, n)?;
        let fixed = if cfg.fixed_code {
            let g = sample_regular(&ens, &mut derived(cfg.seed, &[ni as u64, u64::MAX]))?;
            let h = ParityCheckMatrix::from_graph(&g);
            Some((g, h))
        } else {
            None
        };
        for (pi, &param) in cfg.params.iter().enumerate() {
            let channel = cfg.channel.with_param(param);
            let mut t = Tally::default();
            let mut start = 0;
            while start < cfg.trials {
                let end = (start + BATCH).min(cfg.trials);
                let batch: Vec<TrialOutcome> = (start..end)
                    .into_par_iter()
                    .map(|trial| {
                        let seed = derive_seed(cfg.seed, &[ni as u64, pi as u64, trial as u64]);
                        run_trial(cfg, &channel, &ens, fixed.as_ref(), seed)
                    })
                    .collect::<Result<_>>()?;
                for o in batch {
                    t.trials += 1;
                    t.bit_errors += o.bit_errors;
                    t.block_errors += (o.bit_errors > 0) as u64;
                    t.iterations += o.iterations;
                    t.residual += o.residual;
                    t.zero_fraction += o.zero_fraction;
                    t.concentrated += ((o.zero_fraction - 0.5).abs() <= 5.0 / (n as f64).sqrt()) as u64;
                }
                start = end;
                if cfg.min_block_errors > 0 && t.block_errors >= cfg.min_block_errors {
                    break;
                }
            }
            let trials = t.trials as f64;
            let bits = t.trials * n as u64;
            out.push(ErrorRateRecord {
                n,
                param,
                pb: t.bit_errors as f64 / bits as f64,
                pb_ci: confidence_half_width(t.bit_errors, bits),
                p_block: t.block_errors as f64 / trials,
                p_block_ci: confidence_half_width(t.block_errors, t.trials),
                trials: t.trials,
                avg_iters: t.iterations as f64 / trials,
                bit_errors: t.bit_errors,
                block_errors: t.block_errors,
                residual_unsat: (cfg.decoder == DecoderKind::Flip).then(|| t.residual as f64 / trials),
                codeword_types: (cfg.codeword == CodewordPolicy::Random).then(|| TypeStats {
                    mean_zero_fraction: t.zero_fraction / trials,
                    concentrated_fraction: t.concentrated as f64 / trials,
                }),
            });
        }
    }
    Ok(out)
}

/// Fit of `P_B ≈ Φ(z/α)` with `z = √N(ε − ε_d [+ β N^{−2/3}])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub alpha: f64,
    pub beta: Option<f64>,
    /// RMS of `Φ⁻¹(P_B) − z/α` over the usable points.
    pub rms_residual: f64,
    /// `(N, param, residual)` per usable point.
    pub residuals: Vec<(usize, f64, f64)>,
}

impl ScalingFit {
    /// RMS residual per blocklength, in increasing `N`.
    pub fn rms_by_n(&self) -> Vec<(usize, f64)> {
        let mut ns: Vec<usize> = self.residuals.iter().map(|r| r.0).collect();
        ns.sort_unstable();
        ns.dedup();
        ns.into_iter()
            .map(|n| {
                let v: Vec<f64> = self.residuals.iter().filter(|r| r.0 == n).map(|r| r.2).collect();
                (n, (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt())
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingComparison {
    pub eps_d: f64,
    pub plain: ScalingFit,
    pub refined: ScalingFit,
    pub refined_improves: bool,
}

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Least-squares fits of `Φ⁻¹(P_B)`; points with `P_B ∈ {0, 1}` are skipped.
pub fn scaling_compare(records: &[ErrorRateRecord], eps_d: f64) -> Result<ScalingComparison> {
    let mut ns: Vec<usize> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(Error::InvalidParameter("need at least 3 blocklengths".into()));
    }
    for &n in &ns {
        if records.iter().filter(|r| r.n == n).count() < 4 {
            return Err(Error::InvalidParameter(format!("need at least 4 parameters at N = {n}")));
        }
    }
    let phi = standard_normal();
    // (n, param, z, w, y)
    let pts: Vec<(usize, f64, f64, f64, f64)> = records
        .iter()
        .filter(|r| r.p_block > 0.0 && r.p_block < 1.0)
        .map(|r| {
            let sn = (r.n as f64).sqrt();
            (r.n, r.param, sn * (r.param - eps_d), sn * (r.n as f64).powf(-2.0 / 3.0), phi.inverse_cdf(r.p_block))
        })
        .collect();
    if pts.len() < 3 {
        return Err(Error::Degenerate("fewer than 3 records with 0 < P_B < 1".into()));
    }
    let szz: f64 = pts.iter().map(|p| p.2 * p.2).sum();
    let szy: f64 = pts.iter().map(|p| p.2 * p.4).sum();
    if szz == 0.0 || szy == 0.0 {
        return Err(Error::Degenerate("no spread in z".into()));
    }
    let a = szy / szz;
    let plain = make_fit(&pts, 1.0 / a, None, |p| a * p.2);

    let sww: f64 = pts.iter().map(|p| p.3 * p.3).sum();
    let szw: f64 = pts.iter().map(|p| p.2 * p.3).sum();
    let swy: f64 = pts.iter().map(|p| p.3 * p.4).sum();
    let det = szz * sww - szw * szw;
    let refined = if det.abs() > 1e-12 * szz * sww {
        let a2 = (szy * sww - swy * szw) / det;
        let c2 = (szz * swy - szw * szy) / det;
        make_fit(&pts, 1.0 / a2, Some(c2 / a2), |p| a2 * p.2 + c2 * p.3)
    } else {
        ScalingFit {
            beta: Some(0.0),
            ..plain.clone()
        }
    };
    Ok(ScalingComparison {
        eps_d,
        refined_improves: refined.rms_residual <= plain.rms_residual + 1e-12,
        plain,
        refined,
    })
}

fn make_fit(pts: &[(usize, f64, f64, f64, f64)], alpha: f64, beta: Option<f64>, pred: impl Fn(&(usize, f64, f64, f64, f64)) -> f64) -> ScalingFit {
    let residuals: Vec<(usize, f64, f64)> = pts.iter().map(|p| (p.0, p.1, p.4 - pred(p))).collect();
    let rms = (residuals.iter().map(|r| r.2 * r.2).sum::<f64>() / residuals.len() as f64).sqrt();
    ScalingFit {
        alpha,
        beta,
        rms_residual: rms,
        residuals,
    }
}

/// Synthetic records with `P_B = Φ(√N(ε − ε_d)/α)` exactly.
pub fn synthetic_records(ns: &[usize], params: &[f64], eps_d: f64, alpha: f64) -> Vec<ErrorRateRecord> {
    let phi = standard_normal();
    ns.iter()
        .flat_map(|&n| {
            params.iter().map(move |&p| {
                let pb = phi.cdf((n as f64).sqrt() * (p - eps_d) / alpha);
                ErrorRateRecord {
                    n,
                    param: p,
                    pb: 0.0,
                    pb_ci: 0.0,
                    p_block: pb,
                    p_block_ci: 0.0,
                    trials: 0,
                    avg_iters: 0.0,
                    bit_errors: 0,
                    block_errors: 0,
                    residual_unsat: None,
                    codeword_types: None,
                }
            })
        })
        .collect()
}

pub fn write_records_csv(path: impl AsRef<Path>, records: &[ErrorRateRecord]) -> Result<()> {
    let path = path.as_ref();
    let text = records_to_csv(records)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn records_to_csv(records: &[ErrorRateRecord]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).map_err(|e| Error::Config(e.to_string()))?;
    for r in records {
        w.serialize(ErrorRateRow::from(r)).map_err(|e| Error::Config(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn read_records_csv(path: impl AsRef<Path>) -> Result<Vec<ErrorRateRow>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::format(path, e))?;
    let header: Vec<String> = r.headers().map_err(|e| Error::format(path, e))?.iter().map(String::from).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::format(path, format!("unexpected header {}", header.join(","))));
    }
    r.deserialize().map(|row| row.map_err(|e| Error::format(path, e))).collect()
}

pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::format(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ExperimentConfig {
        ExperimentConfig {
            l: 3,
            k: 6,
            n: vec![96],
            channel: ChannelKind::Bsc,
            params: vec![0.02, 0.08],
            decoder: DecoderKind::Bp,
            trials: 60,
            max_iter: None,
            seed: 9,
            codeword: CodewordPolicy::AllZero,
            min_block_errors: 100,
            fixed_code: false,
        }
    }

    #[test]
    fn deterministic() {
        let a = run_experiment(&cfg()).unwrap();
        let b = run_experiment(&cfg()).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.pb <= r.p_block + 1e-12));
    }

    #[test]
    fn policy_rules() {
        let mut c = cfg();
        c.channel = ChannelKind::Z;
        c.params = vec![0.1];
        assert!(c.validate().is_err());
        c.codeword = CodewordPolicy::Random;
        assert!(c.validate().is_ok());
        c.channel = ChannelKind::Awgn;
        c.decoder = DecoderKind::Flip;
        c.params = vec![0.5];
        assert!(c.validate().is_err());
    }

    #[test]
    fn toml_roundtrip() {
        let c = cfg();
        let s = c.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&s).unwrap(), c);
    }

    #[test]
    fn synthetic_alpha() {
        let recs = synthetic_records(&[500, 2000, 8000], &[0.07, 0.08, 0.085, 0.09, 0.1], 0.084, 0.35);
        let f = scaling_compare(&recs, 0.084).unwrap();
        assert!((f.plain.alpha / 0.35 - 1.0).abs() < 0.02);
        assert!(f.refined_improves);
    }

    #[test]
    fn binomial_fallback() {
        let w = confidence_half_width(0, 100);
        assert!((w - 0.5 * 0.036217).abs() < 1e-4);
        let w = confidence_half_width(50, 100);
        assert!((w - 1.96 * 0.05).abs() < 1e-3);
    }
}
