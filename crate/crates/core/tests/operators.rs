#![allow(clippy::needless_range_loop)]

//! Operator constructions against direct chart integration.

mod common;

use btq::chart::ChartFn;
use btq::geometry::{make_rule, make_rule_with, RuleLimits};
use btq::hilbert::{dimension, monomial_norm};
use btq::operators::{commutator, prequantum, toeplitz_auto, toeplitz_exact, QuantumOperator};
use btq::symbol::{parse, Symbol};
use btq::{Complex64, Error};

/// `⟨e_j, P_f e_k⟩` with `P_f = −(1/m)∇_{X_f} + i f` integrated in the chart:
/// `X^z = −i(1+zz̄)² ∂_z̄f` and `∇_{∂_z} z^k = (k z^{k−1} − m z̄ z^k/(1+zz̄))`.
fn chart_prequantum(f: &Symbol, m: u32) -> Vec<Vec<Complex64>> {
    let mut fc = ChartFn::constant(0.0);
    for (e, &c) in f.terms() {
        let mut term = ChartFn::constant(1.0).scale(c);
        for (i, &k) in e.iter().enumerate() {
            for _ in 0..k {
                term = &term * &ChartFn::coordinate(i);
            }
        }
        fc = &fc + &term;
    }
    let xz = fc.d_zbar().times_conformal(2).scale(Complex64::new(0.0, -1.0));
    let rule = make_rule_with(m, f.degree(), 6, RuleLimits::default()).unwrap();
    let dim = dimension(m);
    let mf = m as f64;
    let norms: Vec<f64> = (0..dim).map(|k| monomial_norm(m, k).unwrap().sqrt()).collect();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for j in 0..dim {
        for k in 0..dim {
            let v = rule.integrate(|s, t, phi| {
                let z = Complex64::from_polar((s / t).sqrt(), phi);
                let p = 1.0 + z.norm_sqr();
                let zk = z.powu(k as u32);
                let dzk = if k == 0 { Complex64::new(0.0, 0.0) } else { z.powu(k as u32 - 1) * k as f64 };
                let cov = dzk - z.conj() * zk * (mf / p);
                let pf = -xz.eval(z) * cov / mf + Complex64::new(0.0, 1.0) * fc.eval(z) * zk;
                z.conj().powu(j as u32) * pf * p.powi(-(m as i32))
            });
            out[j][k] = v / (norms[j] * norms[k]);
        }
    }
    out
}

#[test]
fn prequantum_matches_chart_integration() {
    for (text, m) in [("x1", 3u32), ("x2*x3 - 0.5*x1", 5), ("x3^2 + x1*x2", 6), ("0.3 + x1 + 0.5*x2*x3", 4)] {
        let f = parse(text).unwrap();
        let q = prequantum(&f, m, &make_rule(m, f.degree() + 2).unwrap()).unwrap();
        let reference = chart_prequantum(&f, m);
        for j in 0..q.dim() {
            for k in 0..q.dim() {
                assert!((q.entry(j, k) - reference[j][k]).norm() < 1e-11, "{text} m={m} ({j},{k})");
            }
        }
    }
}

#[test]
fn spin_matrices() {
    // m i [T_x1, T_x2] equals (2m/(m+2)) T_x3 and the defect is 4m/(m+2)²
    for m in 1..=3u32 {
        let (t1, t2, t3) = (toeplitz_exact(&Symbol::x1(), m), toeplitz_exact(&Symbol::x2(), m), toeplitz_exact(&Symbol::x3(), m));
        let lhs = commutator(&t1, &t2).unwrap().scale(Complex64::new(0.0, m as f64));
        let mf = m as f64;
        let expected = t3.scale_real(2.0 * mf / (mf + 2.0));
        assert!(common::max_abs_diff(&lhs, &expected) < 1e-14);
        let defect = lhs.sub(&t3.scale_real(2.0)).unwrap().operator_norm();
        assert!((defect - 4.0 * mf / (mf + 2.0).powi(2)).abs() < 1e-14);
    }
}

#[test]
fn operator_formats_round_trip() {
    let f = parse("x1 + 0.25*x2*x3").unwrap();
    let t = toeplitz_auto(&f, 6).unwrap();
    let back = QuantumOperator::from_bytes(&t.to_bytes()).unwrap();
    assert_eq!(back.entries(), t.entries());
    let json = serde_json::to_string(&t).unwrap();
    let back: QuantumOperator = serde_json::from_str(&json).unwrap();
    assert_eq!(back.entries(), t.entries());
}

#[test]
fn capacity_errors() {
    let limits = RuleLimits { max_radial: 8, max_angular: 64 };
    assert!(matches!(make_rule_with(40, 2, 0, limits), Err(Error::Capacity { .. })));
}

#[test]
fn power_iteration_agrees_with_eigensolver() {
    let f = parse("x1*x3 + 0.2*x2").unwrap();
    let g = parse("x2 - x3^2").unwrap();
    let a = toeplitz_auto(&f, 12).unwrap().matmul(&toeplitz_auto(&g, 12).unwrap()).unwrap();
    let (p, converged) = a.power_iteration_norm(20_000);
    assert!(converged);
    assert!((p - a.operator_norm()).abs() < 1e-9);
}
