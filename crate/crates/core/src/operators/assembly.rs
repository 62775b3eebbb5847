//! Grid-block assembly of Toeplitz and prequantum matrices.
//!
//! Every level-`m` matrix element is `Σ_s w_s a_j(s) β_k(s) Ĝ_s(q)` where
//! `a_k` are the radial basis amplitudes and `Ĝ_s(q)` is the discrete
//! angular harmonic of a node field on the ring at radius `s`. The symbol is
//! sampled once per node, each ring is transformed once, and the matrix is
//! assembled row by row. Rows are independent sums in a fixed order, which
//! makes the result independent of the thread schedule.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::QuantumOperator;
use crate::error::{Error, Result};
use crate::geometry::{make_rule, KahlerConventions, QuadratureRule, RadialNode};
use crate::hilbert::dimension;
use crate::numeric::{basis_amplitudes, ln_factorials};
use crate::par::{map_indexed, Execution};
use crate::symbol::{laplace_beltrami, Symbol};

const GRAM_TOLERANCE: f64 = 1e-12;

/// `(1+zz̄)² ∂_z̄ x_i` as polynomials in `z` (coefficients of 1, z, z²).
const HOLOMORPHIC_FIELDS: [[Complex64; 3]; 3] = [
    [Complex64 { re: 1.0, im: 0.0 }, Complex64 { re: 0.0, im: 0.0 }, Complex64 { re: -1.0, im: 0.0 }],
    [Complex64 { re: 0.0, im: 1.0 }, Complex64 { re: 0.0, im: 0.0 }, Complex64 { re: 0.0, im: 1.0 }],
    [Complex64 { re: 0.0, im: 0.0 }, Complex64 { re: -2.0, im: 0.0 }, Complex64 { re: 0.0, im: 0.0 }],
];

struct Grid<'a> {
    rule: &'a QuadratureRule,
    m: usize,
    /// `a_k(s)` per radial node.
    amps: Vec<Vec<f64>>,
    /// `e^{2πi l / n_φ}`.
    twiddle: Vec<Complex64>,
}

impl<'a> Grid<'a> {
    fn new(rule: &'a QuadratureRule, m: u32, exec: Execution) -> Self {
        let m = m as usize;
        let lnf = ln_factorials(m);
        let nodes = rule.radial_nodes();
        let amps = map_indexed(nodes.len(), exec, |i| basis_amplitudes(&lnf, m, nodes[i].s, nodes[i].one_minus_s));
        let n = rule.angular_count();
        let twiddle = (0..n).map(|l| Complex64::from_polar(1.0, 2.0 * PI * l as f64 / n as f64)).collect();
        Self { rule, m, amps, twiddle }
    }

    fn nodes(&self) -> &[RadialNode] {
        self.rule.radial_nodes()
    }

    /// Ambient coordinates of angular node `l` on ring `node`.
    fn point(&self, node: &RadialNode, l: usize) -> [f64; 3] {
        let rho = 2.0 * (node.s * node.one_minus_s).sqrt();
        let w = self.twiddle[l];
        [rho * w.re, rho * w.im, node.one_minus_s - node.s]
    }

    /// `Ĝ(q) = (2π/n_φ) Σ_l g_l e^{iqφ_l}` for `q ∈ [-qmax, qmax]`, index `q + qmax`.
    fn spectrum(&self, ring: &[Complex64], qmax: usize) -> Vec<Complex64> {
        let n = self.twiddle.len();
        let dphi = self.rule.angular_weight();
        (0..=2 * qmax)
            .map(|idx| {
                let q = idx as i64 - qmax as i64;
                let mut acc = Complex64::new(0.0, 0.0);
                for (l, g) in ring.iter().enumerate() {
                    let t = (q * l as i64).rem_euclid(n as i64) as usize;
                    acc += g * self.twiddle[t];
                }
                acc * dphi
            })
            .collect()
    }

    /// Samples a node field ring by ring and returns its angular spectra.
    fn field_spectra<F>(&self, qmax: usize, exec: Execution, field: F) -> Vec<Vec<Complex64>>
    where
        F: Fn(&RadialNode, [f64; 3]) -> Complex64 + Sync + Send,
    {
        let nodes = self.nodes();
        map_indexed(nodes.len(), exec, |i| {
            let node = &nodes[i];
            let ring: Vec<Complex64> = (0..self.rule.angular_count())
                .map(|l| field(node, self.point(node, l)))
                .collect();
            self.spectrum(&ring, qmax)
        })
    }

    /// `T_jk = Σ_s w_s a_j a_k F_s(k - j)`.
    fn toeplitz_matrix(&self, spectra: &[Vec<Complex64>], exec: Execution) -> DMatrix<Complex64> {
        let dim = self.m + 1;
        let qmax = self.m as i64;
        let rows = map_indexed(dim, exec, |j| {
            (0..dim)
                .map(|k| {
                    let idx = (k as i64 - j as i64 + qmax) as usize;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (s, node) in self.nodes().iter().enumerate() {
                        let a = &self.amps[s];
                        acc += spectra[s][idx] * (node.weight * a[j] * a[k]);
                    }
                    acc
                })
                .collect::<Vec<_>>()
        });
        DMatrix::from_fn(dim, dim, |j, k| rows[j][k])
    }

    fn gram_defect(&self, exec: Execution) -> f64 {
        let ones = self.field_spectra(self.m, exec, |_, _| Complex64::new(1.0, 0.0));
        let g = self.toeplitz_matrix(&ones, exec);
        let mut worst = 0.0f64;
        for j in 0..=self.m {
            for k in 0..=self.m {
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((g[(j, k)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

fn check_gram(grid: &Grid<'_>, exec: Execution) -> Result<()> {
    let defect = grid.gram_defect(exec);
    if defect > GRAM_TOLERANCE {
        return Err(Error::UnderResolved(format!(
            "Gram self-test at level {} failed with defect {defect:.3e}",
            grid.m
        )));
    }
    Ok(())
}

/// `T_f^(m) = Π (f·)` with entries `⟨e_j, f e_k⟩` by quadrature.
pub fn toeplitz(f: &Symbol, m: u32, rule: &QuadratureRule) -> Result<QuantumOperator> {
    toeplitz_with(f, m, rule, Execution::default())
}

pub fn toeplitz_with(f: &Symbol, m: u32, rule: &QuadratureRule, exec: Execution) -> Result<QuantumOperator> {
    rule.require(m, f.degree(), 0)?;
    let grid = Grid::new(rule, m, exec);
    check_gram(&grid, exec)?;
    let spectra = grid.field_spectra(grid.m, exec, |_, x| f.eval_ambient(x));
    QuantumOperator::from_matrix(m, grid.toeplitz_matrix(&spectra, exec), f.is_real())
}

/// [`toeplitz`] with the minimal exact rule.
pub fn toeplitz_auto(f: &Symbol, m: u32) -> Result<QuantumOperator> {
    toeplitz(f, m, &make_rule(m, f.degree())?)
}

/// Geometric-quantization operator `Q_f^(m) = Π P_f Π`.
///
/// At level `m` the prequantum operator is `P_f = -(1/m) ∇_{X_f} + i f`,
/// the Kostant–Souriau operator of `(M, mω, L^m)`. On a holomorphic
/// representative `p` the covariant derivative along `X_f` reduces to
/// `X^z (p' - m z̄ p/(1+zz̄))` with `X^z = -i(1+zz̄)² ∂_z̄ f`.
pub fn prequantum(f: &Symbol, m: u32, rule: &QuadratureRule) -> Result<QuantumOperator> {
    prequantum_with(f, m, rule, Execution::default())
}

pub fn prequantum_with(f: &Symbol, m: u32, rule: &QuadratureRule, exec: Execution) -> Result<QuantumOperator> {
    if m == 0 {
        return Err(Error::LevelTooSmall(0));
    }
    rule.require(m, f.degree(), 2)?;
    let grid = Grid::new(rule, m, exec);
    check_gram(&grid, exec)?;
    let mf = m as f64;
    let dim = dimension(m);

    let multiplication = grid.field_spectra(grid.m, exec, |_, x| f.eval_ambient(x));
    let t = grid.toeplitz_matrix(&multiplication, exec);

    // U_t = -i Σ_i ∂_i f · (coefficient of z^t in (1+zz̄)² ∂_z̄ x_i)
    let gradient: Vec<Symbol> = (0..3).map(|i| f.partial(i)).collect();
    let qmax = grid.m + 1;
    let field_spectra: Vec<Vec<Vec<Complex64>>> = (0..3)
        .map(|power| {
            grid.field_spectra(qmax, exec, |_, x| {
                let mut u = Complex64::new(0.0, 0.0);
                for (i, g) in gradient.iter().enumerate() {
                    let c = HOLOMORPHIC_FIELDS[i][power];
                    if c != Complex64::new(0.0, 0.0) && !g.is_zero() {
                        u += c * g.eval_ambient(x);
                    }
                }
                Complex64::new(0.0, -1.0) * u
            })
        })
        .collect();

    let nodes = grid.nodes();
    let rows = map_indexed(dim, exec, |j| {
        (0..dim)
            .map(|k| {
                let mut derivative = Complex64::new(0.0, 0.0);
                for (s, node) in nodes.iter().enumerate() {
                    let a = &grid.amps[s];
                    let linear = if node.s > 0.5 {
                        (k as f64 - mf) + mf * node.one_minus_s
                    } else {
                        k as f64 - mf * node.s
                    };
                    let r = (node.s / node.one_minus_s).sqrt();
                    let mut ring = Complex64::new(0.0, 0.0);
                    let mut r_pow = 1.0 / r;
                    for (power, spectra) in field_spectra.iter().enumerate() {
                        // frequency of z^(k-1+power) against e_j
                        let idx = (k as i64 - 1 + power as i64 - j as i64 + qmax as i64) as usize;
                        ring += spectra[s][idx] * r_pow;
                        r_pow *= r;
                    }
                    derivative += ring * (node.weight * a[j] * a[k] * linear);
                }
                Complex64::new(0.0, 1.0) * t[(j, k)] - derivative / mf
            })
            .collect::<Vec<_>>()
    });
    QuantumOperator::from_matrix(m, DMatrix::from_fn(dim, dim, |j, k| rows[j][k]), false)
}

/// Right-hand side of Tuynman's relation, `i T^(m)_{f - Δf/(2m)}`.
pub fn tuynman_rhs(f: &Symbol, m: u32, conv: &KahlerConventions) -> Result<QuantumOperator> {
    if m == 0 {
        return Err(Error::LevelTooSmall(0));
    }
    let corrected = f - &laplace_beltrami(f, conv).scale_real(0.5 / m as f64);
    Ok(toeplitz_auto(&corrected, m)?.times_i())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::parse;

    fn diag_check(op: &QuantumOperator, expect: &[Complex64], tol: f64) {
        for j in 0..op.dim() {
            for k in 0..op.dim() {
                let want = if j == k { expect[j] } else { Complex64::new(0.0, 0.0) };
                assert!((op.entry(j, k) - want).norm() < tol, "({j},{k}): {} vs {want}", op.entry(j, k));
            }
        }
    }

    fn re(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn toeplitz_examples() {
        let one = toeplitz_auto(&Symbol::one(), 6).unwrap();
        diag_check(&one, &re(&[1.0; 7]), 1e-13);
        diag_check(&toeplitz_auto(&Symbol::x3(), 2).unwrap(), &re(&[0.5, 0.0, -0.5]), 1e-14);
        diag_check(&toeplitz_auto(&Symbol::x3().pow(2), 2).unwrap(), &re(&[0.4, 0.2, 0.4]), 1e-14);
    }

    #[test]
    fn toeplitz_rejects_thin_rule() {
        let rule = make_rule(4, 0).unwrap();
        let f = parse("x3^3").unwrap();
        assert!(matches!(toeplitz(&f, 4, &rule), Err(Error::UnderResolved(_))));
    }

    #[test]
    fn prequantum_examples() {
        let i = Complex64::new(0.0, 1.0);
        let rule = make_rule(3, 2).unwrap();
        diag_check(&prequantum(&Symbol::one(), 3, &rule).unwrap(), &[i; 4], 1e-13);
        let rule = make_rule(2, 3).unwrap();
        let q = prequantum(&Symbol::x3(), 2, &rule).unwrap();
        diag_check(&q, &[i, 0.0 * i, -i], 1e-13);
        let rule = make_rule(4, 3).unwrap();
        let q = prequantum(&Symbol::x3(), 4, &rule).unwrap();
        diag_check(&q, &[i, 0.5 * i, 0.0 * i, -0.5 * i, -i], 1e-13);
        assert_eq!(prequantum(&Symbol::x3(), 0, &rule), Err(Error::LevelTooSmall(0)));
    }

    #[test]
    fn tuynman_examples() {
        let conv = KahlerConventions::default();
        let i = Complex64::new(0.0, 1.0);
        diag_check(&tuynman_rhs(&Symbol::constant(1.0), 3, &conv).unwrap(), &[i; 4], 1e-13);
        diag_check(&tuynman_rhs(&Symbol::x3(), 2, &conv).unwrap(), &[i, 0.0 * i, -i], 1e-13);
    }

    #[test]
    fn schedules_agree_bitwise() {
        let f = parse("0.3 + x1 + 0.5*x2*x3 - x1*x3^2").unwrap();
        let rule = make_rule(24, 4).unwrap();
        let a = toeplitz_with(&f, 24, &rule, Execution::Sequential).unwrap();
        let b = toeplitz_with(&f, 24, &rule, Execution::Parallel).unwrap();
        assert_eq!(a.entries(), b.entries());
        let rule = make_rule(10, 6).unwrap();
        let a = prequantum_with(&f, 10, &rule, Execution::Sequential).unwrap();
        let b = prequantum_with(&f, 10, &rule, Execution::Parallel).unwrap();
        assert_eq!(a.entries(), b.entries());
    }
}
