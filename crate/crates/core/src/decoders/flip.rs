//! Greedy bit flipping on the number of violated checks.

use rand::Rng;

use super::DecodeResult;
use crate::codes::TannerGraph;
use crate::error::Result;

/// Flips, one at a time, a bit with strictly more unsatisfied than satisfied
/// checks, chosen uniformly among all such bits. Stops when `U = 0`, when no
/// bit qualifies, or after `max_iter` flips.
pub fn bit_flip_decode<R: Rng + ?Sized>(
    graph: &TannerGraph,
    y: &[u8],
    max_iter: usize,
    truth: Option<&[u8]>,
    rng: &mut R,
) -> Result<DecodeResult> {
    graph.expect_len(y)?;
    if let Some(t) = truth {
        graph.expect_len(t)?;
    }
    let n = graph.n();
    let mut x: Vec<u8> = y.iter().map(|b| b & 1).collect();
    let mut unsat: Vec<bool> = (0..graph.m()).map(|a| !graph.check_satisfied(a, &x)).collect();
    let mut count: Vec<usize> = (0..n)
        .map(|i| graph.var_neighbors(i).filter(|&a| unsat[a]).count())
        .collect();
    let mut u: usize = unsat.iter().filter(|&&b| b).count();

    // Eligible set with O(1) insert, remove and uniform choice.
    let mut eligible: Vec<usize> = Vec::new();
    let mut pos = vec![usize::MAX; n];
    let qualifies = |c: usize, i: usize| 2 * c > graph.var_degree(i);
    for i in 0..n {
        if qualifies(count[i], i) {
            pos[i] = eligible.len();
            eligible.push(i);
        }
    }

    let mut u_trace = vec![u];
    let mut err_trace = truth.map(|t| vec![hamming(&x, t)]);
    let mut flips = 0;
    while u > 0 && !eligible.is_empty() && flips < max_iter {
        let i = eligible[rng.random_range(0..eligible.len())];
        x[i] ^= 1;
        flips += 1;
        for a in graph.var_neighbors(i) {
            unsat[a] = !unsat[a];
            if unsat[a] {
                u += 1;
            } else {
                u -= 1;
            }
            for j in graph.chk_neighbors(a) {
                if unsat[a] {
                    count[j] += 1;
                } else {
                    count[j] -= 1;
                }
                let now = qualifies(count[j], j);
                let was = pos[j] != usize::MAX;
                if now && !was {
                    pos[j] = eligible.len();
                    eligible.push(j);
                } else if !now && was {
                    let p = pos[j];
                    let last = eligible.pop().expect("non-empty");
                    if last != j {
                        eligible[p] = last;
                        pos[last] = p;
                    }
                    pos[j] = usize::MAX;
                }
            }
        }
        u_trace.push(u);
        if let (Some(tr), Some(t)) = (err_trace.as_mut(), truth) {
            tr.push(hamming(&x, t));
        }
    }
    Ok(DecodeResult {
        estimate: x,
        iterations: flips,
        converged: u == 0,
        bit_error_trace: err_trace,
        tie_breaks: 0,
        posterior_llrs: None,
        unsat_trace: Some(u_trace),
    })
}

fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::hamming_7_4;
    use crate::rng::seeded;

    #[test]
    fn codeword_is_a_fixed_point() {
        let g = hamming_7_4();
        let y = [1u8, 1, 1, 0, 0, 0, 0];
        let r = bit_flip_decode(&g, &y, 100, None, &mut seeded(0)).unwrap();
        assert_eq!(r.estimate, y.to_vec());
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn corrects_last_bit_in_one_flip() {
        // Bit 7 sits in all three checks, but degree-1 and degree-2 bits are
        // eligible too, so only some choices repair the word in one flip.
        let g = hamming_7_4();
        let c = vec![1u8, 1, 1, 0, 0, 0, 0];
        let mut y = c.clone();
        y[6] ^= 1;
        let mut one_flip = 0;
        for seed in 0..64 {
            let r = bit_flip_decode(&g, &y, 100, None, &mut seeded(seed)).unwrap();
            assert!(r.converged);
            if r.iterations == 1 && r.estimate == c {
                one_flip += 1;
                assert_eq!(r.unsat_trace.as_deref(), Some(&[3, 0][..]));
            }
        }
        assert!(one_flip > 0);
    }

    #[test]
    fn energy_strictly_decreases() {
        let ens = crate::codes::RegularEnsemble::new(5, 10, 200).unwrap();
        let mut rng = seeded(4);
        let g = crate::codes::sample_regular(&ens, &mut rng).unwrap();
        let y: Vec<u8> = (0..200).map(|_| (rng.random::<f64>() < 0.05) as u8).collect();
        let r = bit_flip_decode(&g, &y, 10_000, None, &mut rng).unwrap();
        let tr = r.unsat_trace.unwrap();
        assert!(tr.windows(2).all(|w| w[1] < w[0]));
        assert!(r.iterations <= g.m());
    }
}
