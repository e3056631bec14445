use mct_core::channels::{Channel, Output};
use mct_core::codes::{from_alist, sample_regular, to_alist, ParityCheckMatrix, RegularEnsemble};
use mct_core::decoders::bit_flip_decode;
use mct_core::density_evolution::bit_entropy_of_llr;
use mct_core::harness::{self, confidence_half_width, ErrorRateRecord};
use mct_core::info::binary_entropy_nats;
use mct_core::llr::check_rule;
use mct_core::markov_channels::{self as gec, MarkovChannelSpec};
use mct_core::rng::seeded;
use mct_core::satisfiability::{self as sat, CnfFormula, ProbeMethod};
use mct_core::weight_enumerator::growth_rate;
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn stochastic_matrix(seed: u64, s: usize) -> Vec<Vec<f64>> {
    let mut rng = seeded(seed);
    let mut p = vec![vec![0.0; s]; s];
    for c in 0..s {
        let col: Vec<f64> = (0..s).map(|_| rng.random_range(0.05..1.0)).collect();
        let z: f64 = col.iter().sum();
        for r in 0..s {
            p[r][c] = col[r] / z;
        }
    }
    p
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn kernels_normalize(p in 0.0f64..0.5, x in 0u8..2) {
        for ch in [Channel::Bsc(p), Channel::Z(p)] {
            let s = ch.transition_prob(x, Output::Bit(0)).unwrap() + ch.transition_prob(x, Output::Bit(1)).unwrap();
            prop_assert!((s - 1.0).abs() < 1e-15);
        }
        let bec = Channel::Bec(p);
        let s = bec.transition_prob(x, Output::Bit(0)).unwrap() + bec.transition_prob(x, Output::Bit(1)).unwrap()
            + bec.transition_prob(x, Output::Erasure).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_llrs(p in 0.001f64..0.499, v in -3.0f64..3.0) {
        let bsc = Channel::Bsc(p);
        prop_assert!((bsc.llr(Output::Bit(0)).unwrap().0 + bsc.llr(Output::Bit(1)).unwrap().0).abs() < 1e-12);
        let awgn = Channel::Awgn(0.3 + p);
        prop_assert!((awgn.llr(Output::Real(v)).unwrap().0 + awgn.llr(Output::Real(-v)).unwrap().0).abs() < 1e-12);
    }

    #[test]
    fn capacities_in_unit_interval(p in 0.0f64..0.5) {
        for ch in [Channel::Bsc(p), Channel::Bec(p), Channel::Z(p)] {
            let c = ch.capacity().unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&c));
            prop_assert!(ch.uniform_input_rate().unwrap() <= c + 1e-9);
        }
    }

    #[test]
    fn check_rule_bounds(v in proptest::collection::vec(-30.0f64..30.0, 1..8)) {
        let out = check_rule(&v);
        let min = v.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        prop_assert!(out.abs() <= min + 1e-9);
        let neg = v.iter().filter(|&&x| x < 0.0).count();
        if out != 0.0 {
            prop_assert_eq!(out < 0.0, neg % 2 == 1);
        }
        let mut r = v.clone();
        r.reverse();
        prop_assert!((check_rule(&r) - out).abs() < 1e-12);
    }

    #[test]
    fn bit_entropy_range(h in -40.0f64..40.0) {
        let e = bit_entropy_of_llr(h);
        prop_assert!((0.0..=1.0).contains(&e));
        prop_assert!((e - bit_entropy_of_llr(-h)).abs() < 1e-12);
    }

    #[test]
    fn growth_rate_below_entropy(omega in 0.001f64..0.5) {
        let g = growth_rate(3, 6, omega).unwrap();
        prop_assert!(g.phi <= binary_entropy_nats(omega) + 1e-9);
    }

    #[test]
    fn confidence_width_sane(errors in 0u64..200, extra in 0u64..2000) {
        let w = confidence_half_width(errors, errors + extra + 1);
        prop_assert!(w > 0.0 && w <= 0.5);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn ensemble_structure(seed in any::<u64>(), which in 0usize..3) {
        let (l, k) = [(3, 6), (4, 8), (5, 10)][which];
        let ens = RegularEnsemble::new(l, k, 40).unwrap();
        let g = sample_regular(&ens, &mut seeded(seed)).unwrap();
        prop_assert!(g.num_edges() <= 40 * l);
        prop_assert_eq!((40 * l - g.num_edges()) % 2, 0);
        prop_assert!((0..g.n()).all(|i| g.var_degree(i) <= l));
        prop_assert!((0..g.m()).all(|a| g.chk_degree(a) <= k));
        prop_assert_eq!(to_alist(&from_alist(&to_alist(&g)).unwrap()), to_alist(&g));
        let h = ParityCheckMatrix::from_graph(&g);
        prop_assert!(h.rank() <= g.m());
        let x = h.sample_codeword(&mut seeded(seed ^ 1));
        prop_assert!(g.is_codeword(&x).unwrap());
    }

    #[test]
    fn flipping_lowers_energy(seed in any::<u64>(), p in 0.0f64..0.1) {
        let mut rng = seeded(seed);
        let g = sample_regular(&RegularEnsemble::new(5, 10, 100).unwrap(), &mut rng).unwrap();
        let y: Vec<u8> = (0..100).map(|_| (rng.random::<f64>() < p) as u8).collect();
        let r = bit_flip_decode(&g, &y, 1000, None, &mut rng).unwrap();
        let tr = r.unsat_trace.unwrap();
        prop_assert!(tr.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn steady_state_is_stationary(seed in any::<u64>(), s in 1usize..5) {
        let p = stochastic_matrix(seed, s);
        let spec = MarkovChannelSpec::new(p.clone(), vec![0.1; s]).unwrap();
        let pi = spec.steady_state().unwrap();
        prop_assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        for i in 0..s {
            let v: f64 = (0..s).map(|j| p[i][j] * pi[j]).sum();
            prop_assert!((v - pi[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn information_rate_bounds(seed in any::<u64>()) {
        let p = stochastic_matrix(seed, 2);
        let spec = MarkovChannelSpec::new(p, vec![0.02, 0.3]).unwrap();
        let r = gec::entropy_rates(&spec, 20_000, seed).unwrap();
        prop_assert!(r.h_xy >= r.h_y - 1e-9);
        prop_assert!(r.info_rate <= 1.0 + 1e-9 && r.info_rate >= 0.0);
    }

    #[test]
    fn dimacs_roundtrip(seed in any::<u64>(), n in 4usize..30, alpha in 0.0f64..4.0) {
        let f = sat::random_ksat(n, alpha, 3, false, &mut seeded(seed)).unwrap();
        prop_assert!(f.clauses.iter().all(|c| c.len() == 3));
        prop_assert_eq!(CnfFormula::from_dimacs(&f.to_dimacs()).unwrap(), f);
    }

    #[test]
    fn brute_force_marginals_consistent(seed in any::<u64>(), alpha in 0.0f64..3.0) {
        let f = sat::random_ksat(10, alpha, 3, false, &mut seeded(seed)).unwrap();
        if let Ok(m) = sat::brute_force_marginals(&f) {
            prop_assert!(m.p_true.iter().all(|p| (0.0..=1.0).contains(p)));
            prop_assert!(m.solutions >= 1 && m.solutions <= 1024);
        }
    }

    #[test]
    fn probe_extremes_ordered(seed in any::<u64>(), alpha in 0.0f64..1.0, t in 0usize..3) {
        let tree = sat::sample_tree_formula(3, alpha, t, &mut seeded(seed)).unwrap();
        prop_assume!(tree.boundary().len() <= 12);
        if let Ok(p) = sat::decay_probe(&tree, &ProbeMethod::Exhaustive { limit: 12 }) {
            prop_assert!(p.h_max >= p.h_min);
            prop_assert!(p.mu_spread >= 0.0);
            if tree.boundary().is_empty() {
                prop_assert_eq!(p.mu_spread, 0.0);
            }
        }
    }
}

#[test]
fn sampled_probe_bounded_by_exhaustive() {
    let mut rng = seeded(31);
    for i in 0..40 {
        let tree = sat::sample_tree_formula(3, 0.5, 2, &mut rng).unwrap();
        if tree.boundary().len() > 12 {
            continue;
        }
        let (Ok(ex), Ok(sa)) = (
            sat::decay_probe(&tree, &ProbeMethod::Exhaustive { limit: 12 }),
            sat::decay_probe(&tree, &ProbeMethod::Sampled { samples: 16, seed: i }),
        ) else {
            continue;
        };
        assert!(sa.mu_spread <= ex.mu_spread + 1e-15);
    }
}

#[test]
fn literal_sign_balance() {
    let f = sat::random_ksat(1000, 33.4, 3, false, &mut seeded(8)).unwrap();
    let lits: Vec<bool> = f.clauses.iter().flatten().map(|l| l.negated).collect();
    assert!(lits.len() >= 100_000);
    let frac = lits.iter().filter(|&&b| b).count() as f64 / lits.len() as f64;
    assert!((frac - 0.5).abs() < 4.0 * (0.25 / lits.len() as f64).sqrt());
}

#[test]
fn records_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let recs = harness::synthetic_records(&[100, 400], &[0.05, 0.08], 0.084, 0.4);
    let csv = dir.path().join("r.csv");
    harness::write_records_csv(&csv, &recs).unwrap();
    let rows = harness::read_records_csv(&csv).unwrap();
    assert_eq!(rows.len(), recs.len());
    assert_eq!(rows[1].p_block, recs[1].p_block);
    let json = dir.path().join("r.json");
    harness::write_json(&json, &recs).unwrap();
    let back: Vec<ErrorRateRecord> = harness::read_json(&json).unwrap();
    assert_eq!(back.len(), recs.len());
    assert_eq!(back[3].p_block, recs[3].p_block);
    let empty = dir.path().join("e.csv");
    harness::write_records_csv(&empty, &[]).unwrap();
    assert_eq!(std::fs::read_to_string(&empty).unwrap(), format!("{}\n", harness::CSV_HEADER));
}
