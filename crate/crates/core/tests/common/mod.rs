#![allow(dead_code)]

use btq::symbol::Symbol;
use btq::{Complex64, SpherePoint};
use rand::Rng;

/// Exponents of all monomials of total degree ≤ `deg`.
pub fn exponents(deg: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=deg {
        for b in 0..=deg - a {
            for c in 0..=deg - a - b {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Real symbol with uniform coefficients in `[-1, 1]`.
pub fn random_real_symbol<R: Rng>(rng: &mut R, deg: u32) -> Symbol {
    Symbol::from_terms(exponents(deg).into_iter().map(|e| (e, Complex64::new(rng.gen_range(-1.0..1.0), 0.0))))
}

/// Symbol with small integer coefficients; products and brackets of these
/// stay exact in floating point.
pub fn random_integer_symbol<R: Rng>(rng: &mut R, deg: u32) -> Symbol {
    Symbol::from_terms(exponents(deg).into_iter().map(|e| (e, Complex64::new(rng.gen_range(-3..=3) as f64, 0.0))))
}

pub fn random_point<R: Rng>(rng: &mut R) -> SpherePoint {
    let u: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    SpherePoint::from_angles(u.acos(), phi)
}

pub fn max_abs_diff(a: &btq::QuantumOperator, b: &btq::QuantumOperator) -> f64 {
    a.entries()
        .iter()
        .zip(b.entries().iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
