mod common;

use common::*;
use mct_core::channels::Channel;
use mct_core::codes::{hamming_7_4, sample_regular, ParityCheckMatrix, RegularEnsemble};
use mct_core::decoders::{bp_decode, map_decode_bruteforce};
use mct_core::markov_channels::{self as gec, JointDecodeOptions, MarkovChannelSpec};
use mct_core::rng::seeded;
use mct_core::satisfiability::{self as sat, BpInit};
use mct_core::weight_enumerator::expected_weight_enumerator_all;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tree_bp_matches_exact(seed in any::<u64>(), checks in 1usize..6, p in 0.02f64..0.4) {
        let mut rng = seeded(seed);
        let g = random_tree_code(&mut rng, checks);
        prop_assert!(tree_bp_gap(&g, &Channel::Bsc(p), &mut rng, 2 * checks + 2) < 1e-10);
        prop_assert!(tree_bp_gap(&g, &Channel::Awgn(0.8), &mut rng, 2 * checks + 2) < 1e-10);
    }

    #[test]
    fn generic_engine_matches_ldpc(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let n = 6 * rng.random_range(2..5);
        let g = sample_regular(&RegularEnsemble::new(3, 6, n).unwrap(), &mut rng).unwrap();
        let llrs: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
        prop_assert!(generic_vs_ldpc(&g, &llrs, 5) < 1e-12);
    }

    #[test]
    fn tree_formula_bp_is_exact(seed in any::<u64>(), alpha in 0.1f64..0.8) {
        let mut rng = seeded(seed);
        let t = sat::sample_tree_formula(3, alpha, 2, &mut rng).unwrap();
        prop_assume!(t.formula.n <= 20);
        let exact = sat::brute_force_marginals(&t.formula).unwrap();
        let g = t.formula.to_factor_graph().unwrap();
        let bp = sat::generic_bp(&g, 6, BpInit::Uniform, 0.0).unwrap();
        for (m, e) in bp.iter().zip(&exact.p_true) {
            prop_assert!((m[1] - e).abs() < 1e-10);
            prop_assert!((m[0] + m[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_matches_exhaustive(seed in any::<u64>(), g in 0.6f64..0.99, b in 0.5f64..0.95) {
        let spec = MarkovChannelSpec::gilbert_elliott(g, b, 0.02, 0.3).unwrap();
        let mut rng = seeded(seed);
        let n = rng.random_range(1..=8);
        let ys: Vec<u8> = (0..n).map(|_| rng.random::<bool>() as u8).collect();
        let f = gec::forward(&spec, &ys, None).unwrap();
        for s in 0..2 {
            let oracle = exhaustive_gec(&spec, &ys, s);
            prop_assert!((f.log_joint(s).exp() / oracle - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn forward_matches_exhaustive_at_twelve() {
    let spec = MarkovChannelSpec::gilbert_elliott(0.9, 0.7, 0.01, 0.25).unwrap();
    let mut rng = seeded(4);
    let ys: Vec<u8> = (0..12).map(|_| rng.random::<bool>() as u8).collect();
    let f = gec::forward(&spec, &ys, None).unwrap();
    for s in 0..2 {
        let oracle = exhaustive_gec(&spec, &ys, s);
        assert!((f.log_joint(s).exp() / oracle - 1.0).abs() < 1e-9);
    }
}

#[test]
fn three_state_forward_matches_exhaustive() {
    let spec = MarkovChannelSpec::three_state_example();
    let ys = [0, 1, 1, 0, 0, 1, 0];
    let f = gec::forward(&spec, &ys, None).unwrap();
    for s in 0..3 {
        assert!((f.log_joint(s).exp() / exhaustive_gec(&spec, &ys, s) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn weight_enumerator_matches_configuration_model() {
    let mut rng = seeded(77);
    for (l, k, n) in [(2, 3, 3), (2, 4, 4), (3, 6, 6)] {
        let exact = expected_weight_enumerator_all(l, k, n).unwrap();
        let (mean, se) = config_model_weights(l, k, n, 10_000, &mut rng);
        for w in 0..=n {
            let e = exact[w].to_f64().unwrap();
            assert!((mean[w] - e).abs() <= 3.0 * se[w] + 1e-12, "({l},{k},{n}) w={w}: {} vs {e}", mean[w]);
        }
    }
}

#[test]
fn single_state_joint_decoder_is_bp() {
    let spec = MarkovChannelSpec::new(vec![vec![1.0]], vec![0.06]).unwrap();
    for seed in 0..10 {
        let mut rng = seeded(seed);
        let g = sample_regular(&RegularEnsemble::new(3, 6, 120).unwrap(), &mut rng).unwrap();
        let s = gec::sample_sequence(&spec, 120, &mut rng).unwrap();
        let y: Vec<u8> = s.outputs.iter().zip(&s.inputs).map(|(a, b)| a ^ b).collect();
        let opts = JointDecodeOptions {
            rounds: 50,
            ..JointDecodeOptions::default()
        };
        let joint = gec::joint_decode_gec(&g, &spec, &y, &opts, None, &mut seeded(1)).unwrap();
        let m = 0.5 * (0.94f64 / 0.06).ln();
        let llrs: Vec<f64> = y.iter().map(|&b| if b == 0 { m } else { -m }).collect();
        let bp = bp_decode(&g, &llrs, 50, &mut seeded(1)).unwrap();
        assert_eq!(joint.decode.estimate, bp.estimate);
        assert_eq!(joint.decode.iterations, bp.iterations);
        let pj = joint.decode.posterior_llrs.unwrap();
        let pb = bp.posterior_llrs.unwrap();
        for (a, b) in pj.iter().zip(&pb) {
            assert!(a == b || (a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn joint_decoder_close_to_genie() {
    let spec = MarkovChannelSpec::three_state_example();
    let mut joint_err = 0;
    let mut genie_err = 0;
    let mut plain_err = 0;
    for seed in 0..6 {
        let mut rng = seeded(100 + seed);
        let g = sample_regular(&RegularEnsemble::new(3, 6, 2000).unwrap(), &mut rng).unwrap();
        let x = vec![0u8; 2000];
        let init = spec.initial_distribution().unwrap();
        let s = gec::transmit(&spec, &x, &init, &mut rng).unwrap();
        let opts = JointDecodeOptions {
            rounds: 60,
            ..JointDecodeOptions::default()
        };
        joint_err += gec::joint_decode_gec(&g, &spec, &s.outputs, &opts, None, &mut rng).unwrap().decode.bit_errors(&x);
        genie_err += bp_decode(&g, &gec::genie_llrs(&spec, &s), 60, &mut rng).unwrap().bit_errors(&x);
        let eps = spec.average_crossover().unwrap();
        let m = 0.5 * ((1.0 - eps) / eps).ln();
        let memoryless: Vec<f64> = s.outputs.iter().map(|&b| if b == 0 { m } else { -m }).collect();
        plain_err += bp_decode(&g, &memoryless, 60, &mut rng).unwrap().bit_errors(&x);
    }
    assert!(genie_err <= joint_err);
    assert!(joint_err < plain_err, "joint {joint_err} vs memoryless {plain_err}");
}

#[test]
fn symbol_map_not_worse_than_bp() {
    let g = hamming_7_4();
    let h = ParityCheckMatrix::from_graph(&g);
    let ch = Channel::Bsc(0.1);
    let mut rng = seeded(5);
    let (mut map_sum, mut bp_sum, mut sq) = (0.0, 0.0, 0.0);
    let trials = 4000;
    for _ in 0..trials {
        let x = h.sample_codeword(&mut rng);
        let y = ch.transmit(&x, &mut rng);
        let llrs: Vec<f64> = ch.llrs(&y).unwrap().into_iter().map(|l| l.0).collect();
        let m = map_decode_bruteforce(&h, &ch, &y).unwrap().symbol_errors(&x);
        let b = bp_decode(&g, &llrs, 50, &mut rng).unwrap().bit_errors(&x) as f64;
        map_sum += m;
        bp_sum += b;
        sq += (b - m) * (b - m);
    }
    let t = trials as f64;
    let d = (bp_sum - map_sum) / t;
    let se = ((sq / t - d * d).max(0.0) / t).sqrt();
    assert!(d >= -3.0 * se);
}
