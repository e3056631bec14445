#![allow(dead_code)]

use mct_core::channels::Channel;
use mct_core::codes::{ParityCheckMatrix, TannerGraph};
use mct_core::decoders::{map_decode_bruteforce, BpState};
use mct_core::llr::prob_zero;
use mct_core::markov_channels::MarkovChannelSpec;
use mct_core::rng::SimRng;
use mct_core::satisfiability::{BpInit, FactorGraphGeneric, GenericBp};
use rand::seq::SliceRandom;
use rand::Rng;

/// Tree-shaped Tanner graph: each new check hangs off an existing variable
/// and brings 1–3 fresh variables.
pub fn random_tree_code(rng: &mut SimRng, checks: usize) -> TannerGraph {
    let mut n = 1;
    let mut edges = Vec::new();
    for a in 0..checks {
        let parent = rng.random_range(0..n);
        edges.push((parent, a));
        for _ in 0..rng.random_range(1..=3) {
            edges.push((n, a));
            n += 1;
        }
    }
    TannerGraph::from_edges(n, checks, edges).unwrap()
}

/// Largest gap between BP posterior `P(x_i = 0)` after `iters` steps and the exact marginals.
pub fn tree_bp_gap(g: &TannerGraph, channel: &Channel, rng: &mut SimRng, iters: usize) -> f64 {
    let x = vec![0u8; g.n()];
    let y = channel.transmit(&x, rng);
    let llrs: Vec<f64> = channel.llrs(&y).unwrap().into_iter().map(|l| l.0).collect();
    let mut st = BpState::new(g, &llrs, 25.0).unwrap();
    for _ in 0..iters {
        st.step();
    }
    let exact = map_decode_bruteforce(&ParityCheckMatrix::from_graph(g), channel, &y).unwrap();
    st.totals()
        .iter()
        .zip(&exact.marginals_zero)
        .map(|(&t, &p0)| (prob_zero(t) - p0).abs())
        .fold(0.0, f64::max)
}

fn llr_of(m: [f64; 2]) -> f64 {
    0.5 * (m[0] / m[1]).ln()
}

/// Largest gap between the generic engine and the LDPC decoder over `iters` rounds.
pub fn generic_vs_ldpc(g: &TannerGraph, llrs: &[f64], iters: usize) -> f64 {
    let fg = FactorGraphGeneric::from_tanner(g, llrs).unwrap();
    let init: Vec<[f64; 2]> = (0..fg.num_edges())
        .map(|e| {
            if e < g.num_edges() {
                let b = llrs[g.edge(e).0];
                [b.exp(), (-b).exp()]
            } else {
                [0.5, 0.5]
            }
        })
        .collect();
    let mut gen = GenericBp::new(&fg, BpInit::Messages(init), 0.0).unwrap();
    let mut ldpc = BpState::new(g, llrs, 25.0).unwrap();
    ldpc.step();
    let mut worst: f64 = 0.0;
    for _ in 0..iters {
        gen.step().unwrap();
        for e in 0..g.num_edges() {
            worst = worst.max((llr_of(gen.fac_to_var()[e]) - ldpc.u()[e]).abs());
        }
        ldpc.step();
        for e in 0..g.num_edges() {
            worst = worst.max((llr_of(gen.var_to_fac()[e]) - ldpc.h()[e]).abs());
        }
    }
    worst
}

/// `p(σ_N = s, y)` by summing over every state path and every input word.
pub fn exhaustive_gec(spec: &MarkovChannelSpec, ys: &[u8], s_final: usize) -> f64 {
    let s = spec.states();
    let n = ys.len();
    let init = spec.initial_distribution().unwrap();
    let paths = s.pow(n as u32);
    let mut total = 0.0;
    for path in 0..paths {
        // σ_1..σ_N digits, σ_N must equal s_final.
        let mut sig = vec![0usize; n + 1];
        let mut rest = path;
        for t in 1..=n {
            sig[t] = rest % s;
            rest /= s;
        }
        if sig[n] != s_final {
            continue;
        }
        for s0 in 0..s {
            sig[0] = s0;
            for xw in 0u32..(1 << n) {
                let mut p = init[s0];
                for t in 1..=n {
                    let x = ((xw >> (t - 1)) & 1) as u8;
                    p *= 0.5 * spec.p[sig[t]][sig[t - 1]] * spec.emission(sig[t], x, ys[t - 1]);
                }
                total += p;
            }
        }
    }
    total
}

/// Configuration-model average of the weight distribution: uniform socket
/// matching, parity counted with edge multiplicity.
pub fn config_model_weights(l: usize, k: usize, n: usize, graphs: usize, rng: &mut SimRng) -> (Vec<f64>, Vec<f64>) {
    let m = n * l / k;
    let mut sum = vec![0.0; n + 1];
    let mut sq = vec![0.0; n + 1];
    let mut perm: Vec<usize> = (0..n * l).collect();
    for _ in 0..graphs {
        perm.shuffle(rng);
        let mut counts = vec![0.0; n + 1];
        for x in 0u32..(1 << n) {
            let ok = (0..m).all(|a| {
                let par: u32 = (0..k).map(|j| (x >> (perm[a * k + j] / l)) & 1).sum();
                par.is_multiple_of(2)
            });
            if ok {
                counts[x.count_ones() as usize] += 1.0;
            }
        }
        for w in 0..=n {
            sum[w] += counts[w];
            sq[w] += counts[w] * counts[w];
        }
    }
    let g = graphs as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / g).collect();
    let se = sq
        .iter()
        .zip(&mean)
        .map(|(q, mu)| ((q / g - mu * mu).max(0.0) / g).sqrt())
        .collect();
    (mean, se)
}
