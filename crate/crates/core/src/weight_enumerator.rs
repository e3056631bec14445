//! Expected weight enumerators of regular ensembles and their growth rate.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::info::{binary_entropy_bits, binary_entropy_nats, inverse_binary_entropy};

/// Residual bound for the saddle-point equation.
pub const SADDLE_TOL: f64 = 1e-12;

fn binomial(n: usize, r: usize) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn ln_binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(r as f64 + 1.0) - ln_gamma((n - r) as f64 + 1.0)
}

/// Coefficients of `q_k(z) = ½[(1+z)^k + (1−z)^k]`: `C(k, m)` for even `m`.
pub fn qk_poly(k: usize) -> Vec<BigUint> {
    (0..=k)
        .map(|m| if m % 2 == 0 { binomial(k, m) } else { BigUint::zero() })
        .collect()
}

/// Coefficients of `poly^M` up to degree `max_deg`, by repeated truncated convolution.
pub fn power_coeffs(poly: &[BigUint], m: usize, max_deg: usize) -> Vec<BigUint> {
    let mut acc = vec![BigUint::zero(); max_deg + 1];
    acc[0] = BigUint::one();
    let support: Vec<(usize, &BigUint)> = poly.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
    for _ in 0..m {
        let mut next = vec![BigUint::zero(); max_deg + 1];
        for (d, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(e, c) in &support {
                if d + e > max_deg {
                    break;
                }
                next[d + e] += a * c;
            }
        }
        acc = next;
    }
    acc
}

/// `coeff[poly^M, z^n]`.
pub fn coeff_power(poly: &[BigUint], m: usize, n: usize) -> BigUint {
    power_coeffs(poly, m, n).pop().unwrap_or_default()
}

fn check_ensemble(l: usize, k: usize, n: usize) -> Result<usize> {
    if l == 0 || k == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!("degenerate ensemble ({l},{k},{n})")));
    }
    if !(n * l).is_multiple_of(k) {
        return Err(Error::Divisibility { l, k, n });
    }
    Ok(n * l / k)
}

/// All `N̄(w) = C(N,w)·coeff[q_k^M, z^{lw}] / C(F, lw)` for `w = 0..=N`, exactly.
pub fn expected_weight_enumerator_all(l: usize, k: usize, n: usize) -> Result<Vec<BigRational>> {
    let m = check_ensemble(l, k, n)?;
    let f = n * l;
    let coeffs = power_coeffs(&qk_poly(k), m, f);
    Ok((0..=n)
        .map(|w| {
            let num = binomial(n, w) * &coeffs[l * w];
            let den = binomial(f, l * w);
            BigRational::new(num.into(), den.into())
        })
        .collect())
}

pub fn expected_weight_enumerator(l: usize, k: usize, n: usize, w: usize) -> Result<BigRational> {
    let m = check_ensemble(l, k, n)?;
    if w > n {
        return Err(Error::InvalidParameter(format!("weight {w} exceeds N={n}")));
    }
    let f = n * l;
    let c = coeff_power(&qk_poly(k), m, l * w);
    let num = binomial(n, w) * c;
    Ok(BigRational::new(num.into(), binomial(f, l * w).into()))
}

fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit mantissa");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a nonnegative rational; `−∞` for zero.
pub fn ln_rational(r: &BigRational) -> f64 {
    let num = r.numer().to_biguint().unwrap_or_default();
    let den = r.denom().to_biguint().unwrap_or_default();
    ln_biguint(&num) - ln_biguint(&den)
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Floating-point `ln N̄(w)` for all `w`, via log-factorials and a log-space convolution.
pub fn log_expected_weight_enumerator_all(l: usize, k: usize, n: usize) -> Result<Vec<f64>> {
    let m = check_ensemble(l, k, n)?;
    let f = n * l;
    let terms: Vec<(usize, f64)> = (0..=k).step_by(2).map(|e| (e, ln_binomial(k, e))).collect();
    let mut acc = vec![f64::NEG_INFINITY; f + 1];
    acc[0] = 0.0;
    for _ in 0..m {
        let mut next = vec![f64::NEG_INFINITY; f + 1];
        for (d, &a) in acc.iter().enumerate() {
            if a == f64::NEG_INFINITY {
                continue;
            }
            for &(e, c) in &terms {
                if d + e > f {
                    break;
                }
                next[d + e] = log_sum_exp(next[d + e], a + c);
            }
        }
        acc = next;
    }
    Ok((0..=n)
        .map(|w| ln_binomial(n, w) + acc[l * w] - ln_binomial(f, l * w))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthPoint {
    pub omega: f64,
    /// Growth rate in nats.
    pub phi: f64,
    /// Saddle point; `NaN` when `omega` lies outside the reachable range.
    pub z: f64,
}

/// Log-weights `ln C(k,m) + m·t` over even `m`, with their log-sum.
fn saddle_moments(k: usize, t: f64) -> (f64, f64, f64) {
    let ws: Vec<(f64, f64)> = (0..=k)
        .step_by(2)
        .map(|m| (m as f64, ln_binomial(k, m) + m as f64 * t))
        .collect();
    let mx = ws.iter().map(|w| w.1).fold(f64::NEG_INFINITY, f64::max);
    let (mut s, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for &(m, w) in &ws {
        let p = (w - mx).exp();
        s += p;
        s1 += p * m;
        s2 += p * m * m;
    }
    let mean = s1 / s;
    (mx + s.ln(), mean, s2 / s - mean * mean)
}

/// Solves `ω = (z/k)·q'_k(z)/q_k(z)` for `z > 0` by Newton in `ln z`,
/// safeguarded by bisection on `(10⁻¹², 10¹²)`.
pub fn saddle_point(k: usize, omega: f64) -> Result<f64> {
    let kf = k as f64;
    let g = |t: f64| {
        let (_, mean, var) = saddle_moments(k, t);
        (mean / kf - omega, var / kf)
    };
    let (mut lo, mut hi) = (1e-12f64.ln(), 1e12f64.ln());
    let (glo, ghi) = (g(lo).0, g(hi).0);
    if glo > 0.0 || ghi < 0.0 {
        return Err(Error::RootFinding(format!("ω={omega} outside the saddle bracket for k={k}")));
    }
    let mut t = (omega / (1.0 - omega)).ln().clamp(lo, hi);
    for _ in 0..500 {
        let (r, d) = g(t);
        if r.abs() <= SADDLE_TOL {
            return Ok(t.exp());
        }
        if r > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let newton = t - r / d;
        t = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 {
            break;
        }
    }
    let r = g(t).0;
    if r.abs() <= SADDLE_TOL {
        Ok(t.exp())
    } else {
        Err(Error::RootFinding(format!("saddle residual {r:e} at ω={omega}")))
    }
}

/// `φ(ω) = (1−l)𝔥(ω) + (l/k)·ln q_k(z) − ω·l·ln z` (nats) at the saddle point.
/// Returns `−∞` when no word of relative weight `ω` can satisfy all checks.
pub fn growth_rate(l: usize, k: usize, omega: f64) -> Result<GrowthPoint> {
    if !(omega > 0.0 && omega < 1.0) {
        return Err(Error::InvalidParameter(format!("ω={omega} not in (0,1)")));
    }
    let max_even = (k - k % 2) as f64 / k as f64;
    if omega >= max_even {
        return Ok(GrowthPoint {
            omega,
            phi: f64::NEG_INFINITY,
            z: f64::NAN,
        });
    }
    let z = saddle_point(k, omega)?;
    let (ln_q, _, _) = saddle_moments(k, z.ln());
    let (lf, kf) = (l as f64, k as f64);
    let phi = (1.0 - lf) * binary_entropy_nats(omega) + lf / kf * ln_q - omega * lf * z.ln();
    Ok(GrowthPoint { omega, phi, z })
}

/// `φ` sampled at `grid` interior points of `(0, 1)`.
pub fn growth_curve(l: usize, k: usize, grid: usize) -> Result<Vec<GrowthPoint>> {
    (1..=grid)
        .map(|j| growth_rate(l, k, j as f64 / (grid + 1) as f64))
        .collect()
}

/// First zero of `φ` in `(0, ½)`, where `φ` turns from negative to positive.
pub fn omega_star(l: usize, k: usize, tol: f64) -> Result<f64> {
    const STEP: f64 = 1e-3;
    let phi = |w: f64| growth_rate(l, k, w).map(|g| g.phi);
    let mut prev = STEP;
    if phi(prev)? >= 0.0 {
        return Err(Error::NoGap);
    }
    let mut found = None;
    let mut w = 2.0 * STEP;
    while w < 0.5 {
        if phi(w)? >= 0.0 {
            found = Some((prev, w));
            break;
        }
        prev = w;
        w += STEP;
    }
    let (mut lo, mut hi) = found.ok_or(Error::NoGap)?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if phi(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Random-code distance exponent `R − 1 + 𝔥₂(δ)` in bits.
pub fn rce_exponent(rate: f64, delta: f64) -> f64 {
    rate - 1.0 + binary_entropy_bits(delta)
}

/// Gilbert–Varshamov distance: smallest `δ > 0` with `R − 1 + 𝔥₂(δ) = 0`.
pub fn gilbert_varshamov(rate: f64, tol: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidParameter(format!("rate {rate} not in [0,1]")));
    }
    Ok(inverse_binary_entropy(1.0 - rate, tol))
}
