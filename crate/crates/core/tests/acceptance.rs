//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints its PASS/FAIL line; exits non-zero when any criterion fails.

mod common;

use std::time::Instant;

use common::*;
use mct_core::channels::{z_capacity, z_optimal_alpha, z_rate, Channel, ChannelKind};
use mct_core::codes::{hamming_7_4, sample_regular, ParityCheckMatrix, RegularEnsemble};
use mct_core::decoders::{bp_decode, map_decode_bruteforce};
use mct_core::density_evolution::{bp_threshold, DeConfig, ThresholdEstimate};
use mct_core::harness::{self, CodewordPolicy, DecoderKind, ErrorRateRecord, ExperimentConfig};
use mct_core::info::binary_entropy_bits;
use mct_core::markov_channels::{self as gec, MarkovChannelSpec};
use mct_core::rng::seeded;
use mct_core::rs_free_energy::{map_threshold, ordering_holds, rs_config};
use mct_core::weight_enumerator::{expected_weight_enumerator_all, gilbert_varshamov, omega_star};
use num_traits::ToPrimitive;
use rand::Rng;

const ENSEMBLES: [(usize, usize); 4] = [(3, 4), (3, 5), (3, 6), (4, 6)];
const BP_TARGETS: [f64; 4] = [0.1669, 0.1138, 0.0840, 0.1169];
const MAP_TARGETS: [f64; 4] = [0.2101, 0.1384, 0.1010, 0.1726];

struct Verdict {
    pass: bool,
    detail: String,
}

fn report(id: usize, name: &str, started: Instant, v: &Verdict) {
    println!(
        "criterion {id} [{name}]: {} ({}; {:.1}s)",
        if v.pass { "PASS" } else { "FAIL" },
        v.detail,
        started.elapsed().as_secs_f64()
    );
}

fn bp_thresholds() -> (Verdict, Vec<ThresholdEstimate>) {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut out = Vec::new();
    for (i, &(l, k)) in ENSEMBLES.iter().enumerate() {
        let cfg = DeConfig {
            population: 100_000,
            seed: 2024 + i as u64,
            ..DeConfig::default()
        };
        let t = bp_threshold(l, k, ChannelKind::Bsc, 5e-4, cfg).expect("threshold");
        let ok = (t.estimate() - BP_TARGETS[i]).abs() <= 0.002;
        pass &= ok;
        parts.push(format!("({l},{k}) {:.4} vs {:.4}", t.estimate(), BP_TARGETS[i]));
        out.push(t);
    }
    (
        Verdict {
            pass,
            detail: parts.join(", "),
        },
        out,
    )
}

fn map_thresholds(bp: &[ThresholdEstimate]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, &(l, k)) in ENSEMBLES.iter().enumerate() {
        let t = map_threshold(l, k, ChannelKind::Bsc, 1e-3, &rs_config(100_000, 2_000_000, 7 + i as u64)).expect("map threshold");
        let ok = (t.estimate() - MAP_TARGETS[i]).abs() <= 0.003 && ordering_holds(&bp[i], &t);
        pass &= ok;
        parts.push(format!("({l},{k}) {:.4} vs {:.4}", t.estimate(), MAP_TARGETS[i]));
    }
    Verdict {
        pass,
        detail: parts.join(", ") + ", p_d <= p_c checked",
    }
}

fn weight_enumerator() -> Verdict {
    let w = omega_star(3, 6, 1e-9).expect("omega star");
    let mut pass = (w - 0.02).abs() <= 0.005;
    let mut rng = seeded(99);
    let mut worst: f64 = 0.0;
    for (l, k, n) in [(2, 3, 3), (2, 4, 4)] {
        let exact = expected_weight_enumerator_all(l, k, n).expect("enumerator");
        let (mean, se) = config_model_weights(l, k, n, 10_000, &mut rng);
        for wt in 0..=n {
            let e = exact[wt].to_f64().unwrap();
            let dev = (mean[wt] - e).abs();
            if se[wt] > 0.0 {
                worst = worst.max(dev / se[wt]);
            }
            pass &= dev <= 3.0 * se[wt] + 1e-12;
        }
    }
    Verdict {
        pass,
        detail: format!("omega* = {w:.5}, worst oracle deviation {worst:.2} sigma"),
    }
}

fn gec_example() -> Verdict {
    let t0 = Instant::now();
    let spec = MarkovChannelSpec::three_state_example();
    let pi = spec.steady_state().unwrap();
    let eps = spec.average_crossover().unwrap();
    let rate = gec::entropy_rates(&spec, 1_000_000, 6).unwrap();
    let baseline = 1.0 - binary_entropy_bits(eps);
    let pass = pi.iter().zip([0.4444, 0.4444, 0.1112]).all(|(a, b)| (a - b).abs() <= 1e-4)
        && (eps - 0.108889).abs() <= 1e-6
        && (rate.info_rate - 0.583).abs() <= 0.005
        && (baseline - 0.503444).abs() <= 1e-4
        && t0.elapsed().as_secs() <= 60;
    Verdict {
        pass,
        detail: format!(
            "steady state ({:.4}, {:.4}, {:.4}), eps_avg {eps:.6}, I {:.4}, 1-h2 {baseline:.6}",
            pi[0], pi[1], pi[2], rate.info_rate
        ),
    }
}

fn bit_flipping() -> Verdict {
    let cfg = ExperimentConfig {
        l: 5,
        k: 10,
        n: vec![1000, 10_000],
        channel: ChannelKind::Bsc,
        params: vec![0.020, 0.025, 0.030],
        decoder: DecoderKind::Flip,
        trials: 500,
        max_iter: None,
        seed: 51,
        codeword: CodewordPolicy::AllZero,
        min_block_errors: 0,
        fixed_code: false,
    };
    let recs = harness::run_experiment(&cfg).unwrap();
    let success = |n: usize, p: f64| {
        let r = recs.iter().find(|r| r.n == n && (r.param - p).abs() < 1e-12).unwrap();
        1.0 - r.p_block
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [1000, 10_000] {
        let (a, m, b) = (success(n, 0.020), success(n, 0.025), success(n, 0.030));
        pass &= a > 0.5 && b < 0.5;
        parts.push(format!("N={n}: success {a:.3}/{m:.3}/{b:.3}"));
    }
    let drop_small = success(1000, 0.020) - success(1000, 0.030);
    let drop_large = success(10_000, 0.020) - success(10_000, 0.030);
    pass &= drop_large > drop_small;
    Verdict {
        pass,
        detail: parts.join(", ") + " at p = 0.020/0.025/0.030",
    }
}

fn capacities() -> Verdict {
    let c = Channel::Bsc(0.110028).capacity().unwrap();
    let gv = gilbert_varshamov(0.5, 1e-12).unwrap();
    let bec_exact = [0.0, 0.1, 0.25, 0.5, 0.9, 1.0].iter().all(|&e| Channel::Bec(e).capacity().unwrap() == 1.0 - e);
    Verdict {
        pass: (c - 0.5).abs() <= 1e-4 && (gv - 0.1100).abs() <= 1e-3 && bec_exact,
        detail: format!("C_BSC = {c:.6}, delta_GV = {gv:.5}, BEC exact {bec_exact}"),
    }
}

fn oracle_equivalences() -> Verdict {
    let mut rng = seeded(70);
    let mut tree_gap: f64 = 0.0;
    for _ in 0..50 {
        let checks = rng.random_range(1..7);
        let g = random_tree_code(&mut rng, checks);
        tree_gap = tree_gap.max(tree_bp_gap(&g, &Channel::Bsc(0.1), &mut rng, 2 * checks + 2));
    }
    let mut generic_gap: f64 = 0.0;
    for _ in 0..20 {
        let n = 6 * rng.random_range(2..5);
        let g = sample_regular(&RegularEnsemble::new(3, 6, n).unwrap(), &mut rng).unwrap();
        let llrs: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
        generic_gap = generic_gap.max(generic_vs_ldpc(&g, &llrs, 5));
    }
    let spec = MarkovChannelSpec::gilbert_elliott(0.9, 0.7, 0.01, 0.25).unwrap();
    let mut fwd_gap: f64 = 0.0;
    for n in [4, 8, 12] {
        let ys: Vec<u8> = (0..n).map(|_| rng.random::<bool>() as u8).collect();
        let f = gec::forward(&spec, &ys, None).unwrap();
        for s in 0..2 {
            fwd_gap = fwd_gap.max((f.log_joint(s).exp() / exhaustive_gec(&spec, &ys, s) - 1.0).abs());
        }
    }
    let g = hamming_7_4();
    let h = ParityCheckMatrix::from_graph(&g);
    let ch = Channel::Bsc(0.1);
    let (mut d_sum, mut d_sq) = (0.0, 0.0);
    let trials = 4000;
    for _ in 0..trials {
        let x = h.sample_codeword(&mut rng);
        let y = ch.transmit(&x, &mut rng);
        let llrs: Vec<f64> = ch.llrs(&y).unwrap().into_iter().map(|l| l.0).collect();
        let m = map_decode_bruteforce(&h, &ch, &y).unwrap().symbol_errors(&x);
        let b = bp_decode(&g, &llrs, 50, &mut rng).unwrap().bit_errors(&x) as f64;
        d_sum += b - m;
        d_sq += (b - m) * (b - m);
    }
    let t = trials as f64;
    let d = d_sum / t;
    let se = ((d_sq / t - d * d).max(0.0) / t).sqrt();
    let pass = tree_gap <= 1e-10 && generic_gap <= 1e-12 && fwd_gap <= 1e-9 && d >= -3.0 * se;
    Verdict {
        pass,
        detail: format!(
            "tree BP {tree_gap:.1e}, generic vs LDPC {generic_gap:.1e}, forward {fwd_gap:.1e}, BP minus MAP errors {d:.4} (se {se:.4})"
        ),
    }
}

fn z_channel() -> Verdict {
    let mut alpha_ok = true;
    for i in 1..=10 {
        let p = i as f64 * 0.09;
        let a = z_optimal_alpha(p);
        let best = z_rate(a, p);
        alpha_ok &= (1..1000).all(|j| z_rate(j as f64 / 1000.0, p) <= best + 1e-6);
    }
    let ratio = (1..=19)
        .map(|i| {
            let p = i as f64 * 0.05;
            z_rate(0.5, p) / z_capacity(p)
        })
        .fold(f64::INFINITY, f64::min);
    let mut cfg = ExperimentConfig {
        l: 3,
        k: 6,
        n: vec![1000],
        channel: ChannelKind::Z,
        params: vec![0.05, 0.2],
        decoder: DecoderKind::Bp,
        trials: 500,
        max_iter: None,
        seed: 8,
        codeword: CodewordPolicy::AllZero,
        min_block_errors: 0,
        fixed_code: false,
    };
    let all_zero_rejected = cfg.validate().is_err();
    cfg.codeword = CodewordPolicy::Random;
    let recs = harness::run_experiment(&cfg).unwrap();
    let conc = recs
        .iter()
        .map(|r| r.codeword_types.unwrap().concentrated_fraction)
        .fold(f64::INFINITY, f64::min);
    Verdict {
        pass: alpha_ok && ratio >= 0.92 && all_zero_rejected && conc >= 0.99,
        detail: format!("alpha(p) optimal {alpha_ok}, min I_half/C = {ratio:.4}, type concentration {conc:.3}"),
    }
}

fn scaling(eps_d: f64) -> Verdict {
    let synth = harness::synthetic_records(&[500, 2000, 8000], &[0.07, 0.075, 0.08, 0.085, 0.09, 0.1], eps_d, 0.35);
    let fit = harness::scaling_compare(&synth, eps_d).unwrap();
    let synth_ok = (fit.plain.alpha / 0.35 - 1.0).abs() <= 0.02 && fit.refined_improves;
    let cfg = ExperimentConfig {
        l: 3,
        k: 6,
        n: vec![128, 512, 2048],
        channel: ChannelKind::Bsc,
        params: vec![0.06, 0.065, 0.07, 0.0725, 0.075, 0.0775, 0.08, 0.085],
        decoder: DecoderKind::Bp,
        trials: 1000,
        max_iter: None,
        seed: 1,
        codeword: CodewordPolicy::AllZero,
        min_block_errors: 0,
        fixed_code: false,
    };
    let recs: Vec<ErrorRateRecord> = harness::run_experiment(&cfg).unwrap();
    let cmp = harness::scaling_compare(&recs, eps_d).unwrap();
    let by_n = cmp.plain.rms_by_n();
    let shrinking = by_n.last().unwrap().1 < by_n.first().unwrap().1;
    let rms: Vec<String> = by_n.iter().map(|(n, r)| format!("N={n}: {r:.3}")).collect();
    Verdict {
        pass: synth_ok && shrinking,
        detail: format!(
            "synthetic alpha {:.4} vs 0.35, simulated alpha {:.3}, plain-fit rms {}, refined rms {:.3} <= plain {:.3}",
            fit.plain.alpha,
            cmp.plain.alpha,
            rms.join(" "),
            cmp.refined.rms_residual,
            cmp.plain.rms_residual
        ),
    }
}

fn main() {
    let mut all = true;
    let mut run = |id: usize, name: &str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        report(id, name, t, &v);
        all &= v.pass;
    };
    let mut bp = Vec::new();
    run(1, "BP thresholds", &mut || {
        let (v, t) = bp_thresholds();
        bp = t;
        v
    });
    let eps_d = bp[2].estimate();
    run(2, "MAP thresholds", &mut || map_thresholds(&bp));
    run(3, "weight enumerator", &mut weight_enumerator);
    run(4, "Markov channel example", &mut gec_example);
    run(5, "bit flipping", &mut bit_flipping);
    run(6, "capacities", &mut capacities);
    run(7, "oracle equivalences", &mut oracle_equivalences);
    run(8, "Z channel", &mut z_channel);
    run(9, "scaling", &mut || scaling(eps_d));
    if !all {
        std::process::exit(1);
    }
}
