//! Half-log-likelihood arithmetic.
//!
//! All log-likelihoods in this crate follow the `½·ln(P(0)/P(1))` convention,
//! so a message `h` corresponds to the bit distribution
//! `P(0) = 1/(1+e^{-2h})`. Infinite values are legal and denote certainty.

use serde::{Deserialize, Serialize};

/// Default saturation magnitude for finite log-likelihoods.
pub const DEFAULT_LLR_CAP: f64 = 25.0;

/// Above this magnitude the check-node product switches to the
/// sign/log-magnitude representation.
pub const LOG_DOMAIN_SWITCH: f64 = 12.0;

/// A half-log-likelihood ratio `½·ln(Q(y|0)/Q(y|1))`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Llr(pub f64);

impl Llr {
    pub const ZERO: Llr = Llr(0.0);
    pub const PLUS_INF: Llr = Llr(f64::INFINITY);
    pub const MINUS_INF: Llr = Llr(f64::NEG_INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Value clamped into `[-cap, cap]`, infinities included.
    pub fn saturated(self, cap: f64) -> f64 {
        self.0.clamp(-cap, cap)
    }

    /// Probability that the bit is 0.
    pub fn prob_zero(self) -> f64 {
        prob_zero(self.0)
    }
}

impl From<f64> for Llr {
    fn from(v: f64) -> Self {
        Llr(v)
    }
}

/// `P(0) = 1/(1+e^{-2h})`.
pub fn prob_zero(h: f64) -> f64 {
    if h >= 0.0 {
        1.0 / (1.0 + (-2.0 * h).exp())
    } else {
        let e = (2.0 * h).exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        0.0
    } else if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln cosh x`, exact for large `|x|`.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `ln|tanh h|`, accurate when `|tanh h|` is close to 1.
pub fn ln_abs_tanh(h: f64) -> f64 {
    let a = h.abs();
    if a == 0.0 {
        return f64::NEG_INFINITY;
    }
    let e = (-2.0 * a).exp();
    (-e).ln_1p() - e.ln_1p()
}

/// Inverse of [`ln_abs_tanh`]: `atanh(e^s)` for `s <= 0`.
pub fn atanh_of_exp(s: f64) -> f64 {
    if s == f64::NEG_INFINITY {
        0.0
    } else if s >= 0.0 {
        f64::INFINITY
    } else {
        0.5 * (s.exp().ln_1p() - (-s.exp_m1()).ln())
    }
}

/// Check-node rule `atanh(Π tanh h_j)` for a single outgoing message.
///
/// Uses the plain product while all inputs are moderate and switches to the
/// sign/log-magnitude form as soon as one of them exceeds
/// [`LOG_DOMAIN_SWITCH`]. Exact zeros propagate as `0`.
pub fn check_rule(inputs: &[f64]) -> f64 {
    if inputs.iter().any(|h| h.abs() > LOG_DOMAIN_SWITCH) {
        let mut negative = false;
        let mut s = 0.0;
        for &h in inputs {
            if h == 0.0 {
                return 0.0;
            }
            negative ^= h < 0.0;
            s += ln_abs_tanh(h);
        }
        let mag = atanh_of_exp(s);
        if negative {
            -mag
        } else {
            mag
        }
    } else {
        let prod: f64 = inputs.iter().map(|h| h.tanh()).product();
        prod.atanh()
    }
}

/// Writes the extrinsic check-node outputs for every edge of one check:
/// `out[i] = atanh(Π_{j≠i} tanh h_j)`.
pub fn check_rule_extrinsic(inputs: &[f64], out: &mut [f64]) {
    let d = inputs.len();
    debug_assert_eq!(d, out.len());
    if d == 1 {
        out[0] = 0.0;
        return;
    }
    if inputs.iter().any(|h| h.abs() > LOG_DOMAIN_SWITCH) {
        // prefix/suffix over (sign, log|tanh|)
        let mut pre_neg = vec![false; d + 1];
        let mut pre_s = vec![0.0; d + 1];
        for j in 0..d {
            pre_neg[j + 1] = pre_neg[j] ^ (inputs[j] < 0.0);
            pre_s[j + 1] = pre_s[j] + ln_abs_tanh(inputs[j]);
        }
        let mut suf_neg = false;
        let mut suf_s = 0.0;
        for j in (0..d).rev() {
            let neg = pre_neg[j] ^ suf_neg;
            let s = pre_s[j] + suf_s;
            let mag = atanh_of_exp(s);
            out[j] = if mag == 0.0 {
                0.0
            } else if neg {
                -mag
            } else {
                mag
            };
            suf_neg ^= inputs[j] < 0.0;
            suf_s += ln_abs_tanh(inputs[j]);
        }
    } else {
        let t: Vec<f64> = inputs.iter().map(|h| h.tanh()).collect();
        let mut pre = vec![1.0; d + 1];
        for j in 0..d {
            pre[j + 1] = pre[j] * t[j];
        }
        let mut suf = 1.0;
        for j in (0..d).rev() {
            out[j] = (pre[j] * suf).atanh();
            suf *= t[j];
        }
    }
}

/// Hard decision from a total log-likelihood: `Some(bit)` or `None` on an exact tie.
pub fn hard_decision(total: f64) -> Option<u8> {
    if total > 0.0 {
        Some(0)
    } else if total < 0.0 {
        Some(1)
    } else {
        None
    }
}

/// JSON has no infinities: finite values are written as numbers and
/// infinite ones as the strings `"inf"` / `"-inf"`.
pub fn serialize_llrs<S: serde::Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for &x in v {
        if x.is_finite() {
            seq.serialize_element(&x)?;
        } else if x > 0.0 {
            seq.serialize_element("inf")?;
        } else {
            seq.serialize_element("-inf")?;
        }
    }
    seq.end()
}

pub(crate) fn serialize_opt_llrs<S: serde::Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => serialize_llrs(v, s),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prob_zero_extremes() {
        assert_eq!(prob_zero(f64::INFINITY), 1.0);
        assert_eq!(prob_zero(f64::NEG_INFINITY), 0.0);
        assert_eq!(prob_zero(0.0), 0.5);
        assert!((prob_zero(0.5 * 9f64.ln()) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn log_and_tanh_forms_agree() {
        let hs = [0.3, -1.2, 2.5, 0.7];
        let direct = check_rule(&hs);
        let s: f64 = hs.iter().map(|&h| ln_abs_tanh(h)).sum();
        let neg = hs.iter().filter(|&&h| h < 0.0).count() % 2 == 1;
        let via_log = if neg { -atanh_of_exp(s) } else { atanh_of_exp(s) };
        assert!((direct - via_log).abs() < 1e-12);
    }

    #[test]
    fn saturated_inputs_stay_finite() {
        let u = check_rule(&[25.0, 25.0, 25.0]);
        assert!(u.is_finite());
        assert!(u > 24.0 && u < 25.0);
        assert_eq!(check_rule(&[f64::INFINITY, f64::INFINITY]), f64::INFINITY);
        assert_eq!(check_rule(&[f64::INFINITY, 0.0]), 0.0);
    }

    #[test]
    fn extrinsic_matches_single() {
        let hs = [0.4, -0.9, 13.0, 1.1, -20.0];
        let mut out = [0.0; 5];
        check_rule_extrinsic(&hs, &mut out);
        for i in 0..hs.len() {
            let others: Vec<f64> = (0..hs.len()).filter(|&j| j != i).map(|j| hs[j]).collect();
            assert!((out[i] - check_rule(&others)).abs() < 1e-12, "edge {i}");
        }
    }

    #[test]
    fn ln_cosh_large() {
        assert!((ln_cosh(1000.0) - (1000.0 - std::f64::consts::LN_2)).abs() < 1e-12);
        assert!((ln_cosh(0.3) - 0.3f64.cosh().ln()).abs() < 1e-15);
    }
}
