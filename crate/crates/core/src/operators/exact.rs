//! Closed-form Toeplitz matrices of polynomial symbols via Beta integrals.
//!
//! Writing `w = x1 + i x2 = 2z/(1+zz̄)`, a monomial `x1^a x2^b x3^c` expands
//! into `w^p w̄^q x3^c`, and `w^p w̄^q = 2^{p+q} z^p z̄^q (1-s)^{p+q}`. Against
//! `z̄^j z^k h^m` the angular integral forces `k + p = j + q`, and the radial
//! integral is a finite sum of Beta functions in `s`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::QuantumOperator;
use crate::hilbert::dimension;
use crate::numeric::binomial;
use crate::symbol::Symbol;

/// `T_f^(m)` with no quadrature.
pub fn toeplitz_exact(f: &Symbol, m: u32) -> QuantumOperator {
    let dim = dimension(m);
    let mu = m as usize;
    let mut mat = DMatrix::<Complex64>::zeros(dim, dim);

    for (e, &coef) in f.terms() {
        let (a, b, c) = (e[0] as usize, e[1] as usize, e[2] as usize);
        let kappa = w_expansion(a, b);
        for (p, &kp) in kappa.iter().enumerate() {
            if kp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let q = a + b - p;
            let scale = coef * kp * 2f64.powi((p + q) as i32);
            for j in 0..dim {
                let kk = j as i64 + q as i64 - p as i64;
                if kk < 0 || kk > mu as i64 {
                    continue;
                }
                let k = kk as usize;
                let mut radial = 0.0;
                for r in 0..=c {
                    let pj = beta_factor(mu, j, q + r, p, p + q + r);
                    let pk = beta_factor(mu, k, p + r, q, p + q + r);
                    radial += binomial(c as u64, r as u64) * (-2f64).powi(r as i32) * (pj * pk).sqrt();
                }
                mat[(j, k)] += scale * radial;
            }
        }
    }
    QuantumOperator::from_matrix(m, mat, f.is_real()).expect("dimension matches level")
}

/// `(m+1) C(m,j) B(j+u+1, m-j+v+1)` as a ratio of short products, where
/// `n = u + v` is the total shift.
///
/// The Toeplitz entry is the geometric mean of this factor at `j` and at `k`.
fn beta_factor(m: usize, j: usize, u: usize, v: usize, n: usize) -> f64 {
    let mut acc = 1.0;
    for i in 1..=u {
        acc *= (j + i) as f64;
    }
    for i in 1..=v {
        acc *= (m - j + i) as f64;
    }
    for i in 1..=n {
        acc /= (m + 1 + i) as f64;
    }
    acc
}

/// Coefficients `κ_p` with `x1^a x2^b = Σ_p κ_p w^p w̄^(a+b-p)`.
fn w_expansion(a: usize, b: usize) -> Vec<Complex64> {
    let mut kappa = vec![Complex64::new(0.0, 0.0); a + b + 1];
    // x1 = (w + w̄)/2, x2 = (w - w̄)/(2i)
    let denom = Complex64::new(2f64.powi(a as i32), 0.0) * Complex64::new(0.0, 2.0).powu(b as u32);
    for p1 in 0..=a {
        for p2 in 0..=b {
            let sign = if (b - p2).is_multiple_of(2) { 1.0 } else { -1.0 };
            kappa[p1 + p2] += Complex64::new(binomial(a as u64, p1 as u64) * binomial(b as u64, p2 as u64) * sign, 0.0) / denom;
        }
    }
    kappa
}
