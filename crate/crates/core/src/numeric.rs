//! Small combinatorial helpers shared by the basis and oracle code.

use std::f64::consts::PI;

/// `ln(n!)` for `n = 0..=max` by cumulative summation.
pub(crate) fn ln_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=max {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

pub(crate) fn ln_binomial(table: &[f64], n: usize, k: usize) -> f64 {
    table[n] - table[k] - table[n - k]
}

/// Binomial coefficient in floating point, multiplicative form.
pub(crate) fn binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 1..=k {
        acc = acc * (n - k + i) as f64 / i as f64;
    }
    acc
}

/// Squared radial amplitudes of the orthonormal basis at a radial node,
/// `|e_k|² h^m = (m+1)/(2π) · C(m,k) s^k (1-s)^(m-k)`, returned as the
/// square roots `a_k(s)`.
pub(crate) fn basis_amplitudes(lnf: &[f64], m: usize, s: f64, one_minus_s: f64) -> Vec<f64> {
    let ln_pref = ((m + 1) as f64 / (2.0 * PI)).ln();
    let ls = s.ln();
    let lt = one_minus_s.ln();
    (0..=m)
        .map(|k| {
            let e = ln_pref + ln_binomial(lnf, m, k) + k as f64 * ls + (m - k) as f64 * lt;
            (0.5 * e).exp()
        })
        .collect()
}
