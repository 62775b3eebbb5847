//! Toeplitz action through the Bergman kernel.
//!
//! `(T_f s)(z) = ∫ K_m(z, ζ) f(ζ) s(ζ) h^m(ζ) Ω(ζ)` with
//! `K_m(z, ζ) = (m+1)/(2π) (1 + z ζ̄)^m`. Expanding the kernel binomially
//! gives the monomial coefficients of the result directly; everything is
//! evaluated by plain powers of `ζ` at the quadrature nodes.

use num_complex::Complex64;

use super::QuantumOperator;
use crate::error::{Error, Result};
use crate::geometry::QuadratureRule;
use crate::hilbert::{dimension, monomial_norm, SectionVector};
use crate::numeric::binomial;
use crate::symbol::Symbol;

struct KernelPath {
    m: u32,
    /// `(weight, f, u, 1-s)` per node with `u = ζ √(1-s)`, so `|u|² = s`.
    nodes: Vec<(f64, Complex64, Complex64, f64)>,
    /// `(m+1)/(2π) C(m,j) √‖z^j‖²` per output coefficient.
    out_scale: Vec<f64>,
    in_scale: Vec<f64>,
}

impl KernelPath {
    fn new(f: &Symbol, m: u32, rule: &QuadratureRule) -> Result<Self> {
        rule.require(m, f.degree(), 0)?;
        let dphi = rule.angular_weight();
        let mut nodes = Vec::with_capacity(rule.node_count());
        for node in rule.radial_nodes() {
            let rho = (node.s / node.one_minus_s).sqrt();
            for l in 0..rule.angular_count() {
                let phi = rule.angle(l);
                let zeta = Complex64::from_polar(rho, phi);
                let denom = 1.0 + zeta.norm_sqr();
                let x = [2.0 * zeta.re / denom, 2.0 * zeta.im / denom, (1.0 - zeta.norm_sqr()) / denom];
                let u = zeta * node.one_minus_s.sqrt();
                nodes.push((node.weight * dphi, f.eval_ambient(x), u, node.one_minus_s));
            }
        }
        let mut out_scale = Vec::with_capacity(dimension(m));
        let mut in_scale = Vec::with_capacity(dimension(m));
        for j in 0..dimension(m) {
            let n = monomial_norm(m, j)?;
            let c = (m as f64 + 1.0) / (2.0 * std::f64::consts::PI) * binomial(m as u64, j as u64);
            out_scale.push(c * n.sqrt());
            in_scale.push(1.0 / n.sqrt());
        }
        Ok(Self { m, nodes, out_scale, in_scale })
    }

    fn apply(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let dim = dimension(self.m);
        let mf = self.m as f64;
        let mut raw = vec![Complex64::new(0.0, 0.0); dim];
        let mut powers = vec![Complex64::new(0.0, 0.0); dim];
        for &(w, fv, u, t) in &self.nodes {
            // ζ^j (1-s)^{m/2} = u^j (1-s)^{(m-j)/2}
            let mut up = Complex64::new(1.0, 0.0);
            for (j, slot) in powers.iter_mut().enumerate() {
                *slot = up * t.powf(0.5 * (mf - j as f64));
                up *= u;
            }
            let mut value = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                value += coeffs[k] * self.in_scale[k] * powers[k];
            }
            let integrand = value * fv * w;
            for j in 0..dim {
                raw[j] += powers[j].conj() * integrand;
            }
        }
        raw.iter().zip(&self.out_scale).map(|(r, c)| r * c).collect()
    }
}

/// `T_f s` by kernel integration.
pub fn kernel_apply(f: &Symbol, m: u32, s: &SectionVector, rule: &QuadratureRule) -> Result<SectionVector> {
    if s.level() != m {
        return Err(Error::LevelMismatch(m, s.level()));
    }
    let path = KernelPath::new(f, m, rule)?;
    SectionVector::new(m, path.apply(s.coeffs()))
}

/// Full matrix from [`kernel_apply`] on each basis vector.
pub fn kernel_matrix(f: &Symbol, m: u32, rule: &QuadratureRule) -> Result<QuantumOperator> {
    let path = KernelPath::new(f, m, rule)?;
    let dim = dimension(m);
    let mut mat = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
    let mut unit = vec![Complex64::new(0.0, 0.0); dim];
    for k in 0..dim {
        unit[k] = Complex64::new(1.0, 0.0);
        let col = path.apply(&unit);
        unit[k] = Complex64::new(0.0, 0.0);
        for j in 0..dim {
            mat[(j, k)] = col[j];
        }
    }
    QuantumOperator::from_matrix(m, mat, f.is_real())
}
