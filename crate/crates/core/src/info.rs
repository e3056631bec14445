//! Entropy helpers. Natural logarithms internally, bits on request.

use std::f64::consts::LN_2;

/// Binary entropy in nats, with `0·ln 0 = 0`.
pub fn binary_entropy_nats(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}

/// Binary entropy in bits, with `0·log 0 = 0`.
pub fn binary_entropy_bits(p: f64) -> f64 {
    binary_entropy_nats(p) / LN_2
}

pub fn nats_to_bits(x: f64) -> f64 {
    x / LN_2
}

/// Smallest `p ∈ [0, ½]` with `h₂(p) = target` (bits), by bisection.
pub fn inverse_binary_entropy(target: f64, tol: f64) -> f64 {
    if target <= 0.0 {
        return 0.0;
    }
    if target >= 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if binary_entropy_bits(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
