//! Holomorphic sections of `L^m` over CP¹.
//!
//! In the chart a section of `L^m` is a polynomial `p(z)` of degree `<= m`
//! with pointwise norm `|p(z)|² (1+|z|²)^{-m}`. Sections are stored in the
//! orthonormal basis `e_k = z^k / sqrt(n_{m,k})` where
//! `n_{m,k} = ‖z^k‖² = 2π k!(m-k)!/(m+1)!`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{diastasis, QuadratureRule, SpherePoint};
use crate::numeric::{basis_amplitudes, binomial, ln_binomial, ln_factorials};

const GRAM_TOLERANCE: f64 = 1e-12;

/// `dim Γ_hol(CP¹, L^m)`.
pub fn dimension(m: u32) -> usize {
    m as usize + 1
}

/// `‖z^k‖² = 2π k!(m-k)!/(m+1)!`.
///
/// Large levels fall back to log-space; the value underflows to zero only
/// when it is genuinely below the smallest subnormal.
pub fn monomial_norm(m: u32, k: usize) -> Result<f64> {
    if k > m as usize {
        return Err(Error::IndexOutOfRange { level: m, index: k });
    }
    let b = binomial(m as u64, k as u64);
    if b.is_finite() {
        Ok(2.0 * PI / ((m as f64 + 1.0) * b))
    } else {
        Ok(ln_monomial_norm(m, k)?.exp())
    }
}

pub fn ln_monomial_norm(m: u32, k: usize) -> Result<f64> {
    if k > m as usize {
        return Err(Error::IndexOutOfRange { level: m, index: k });
    }
    let t = ln_factorials(m as usize + 1);
    Ok((2.0 * PI).ln() + t[k] + t[m as usize - k] - t[m as usize + 1])
}

/// Values `e_k(z) (1+|z|²)^{-m/2}` of all basis sections at one point.
pub fn weighted_basis_at(m: u32, p: &SpherePoint) -> Vec<Complex64> {
    let m = m as usize;
    let lnf = ln_factorials(m);
    let s = p.radial();
    let t = p.radial_complement();
    if t == 0.0 {
        // south pole: only z^m survives
        let mut v = vec![Complex64::new(0.0, 0.0); m + 1];
        v[m] = Complex64::new(((m + 1) as f64 / (2.0 * PI)).sqrt(), 0.0);
        return v;
    }
    if s == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); m + 1];
        v[0] = Complex64::new(((m + 1) as f64 / (2.0 * PI)).sqrt(), 0.0);
        return v;
    }
    let phi = p.azimuth();
    basis_amplitudes(&lnf, m, s, t)
        .into_iter()
        .enumerate()
        .map(|(k, a)| Complex64::from_polar(a, k as f64 * phi))
        .collect()
}

/// Diagonal of the reproducing kernel, `Σ_k |e_k(z)|² (1+|z|²)^{-m}`.
///
/// Equals `(m+1)/(2π)` everywhere.
pub fn kernel_density(m: u32, p: &SpherePoint) -> f64 {
    weighted_basis_at(m, p).iter().map(|v| v.norm_sqr()).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectionVector {
    m: u32,
    coeffs: Vec<Complex64>,
}

impl SectionVector {
    pub fn new(m: u32, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != dimension(m) {
            return Err(Error::Invalid(format!(
                "level {m} needs {} coefficients, got {}",
                dimension(m),
                coeffs.len()
            )));
        }
        Ok(Self { m, coeffs })
    }

    pub fn zero(m: u32) -> Self {
        Self {
            m,
            coeffs: vec![Complex64::new(0.0, 0.0); dimension(m)],
        }
    }

    /// Orthonormal basis vector `e_k`.
    pub fn basis(m: u32, k: usize) -> Result<Self> {
        if k > m as usize {
            return Err(Error::IndexOutOfRange { level: m, index: k });
        }
        let mut v = Self::zero(m);
        v.coeffs[k] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &SectionVector) -> Result<Complex64> {
        if self.m != other.m {
            return Err(Error::LevelMismatch(self.m, other.m));
        }
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// The representing polynomial `p(z)` (no metric weight).
    pub fn eval_polynomial(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            acc += c * z.powu(k as u32) / monomial_norm(self.m, k)?.sqrt();
        }
        Ok(acc)
    }

    /// `p(z) (1+|z|²)^{-m/2}`, whose squared modulus is the pointwise norm.
    pub fn eval_weighted(&self, p: &SpherePoint) -> Complex64 {
        weighted_basis_at(self.m, p)
            .iter()
            .zip(&self.coeffs)
            .map(|(e, c)| e * c)
            .sum()
    }

    /// `h^m(s, s)(x)`.
    pub fn pointwise_norm(&self, p: &SpherePoint) -> f64 {
        self.eval_weighted(p).norm_sqr()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| c / n).collect(),
        }
    }
}

/// `∫ h^m(a, b) Ω` evaluated by quadrature from pointwise values.
pub fn quadrature_inner(a: &SectionVector, b: &SectionVector, rule: &QuadratureRule) -> Result<Complex64> {
    if a.m != b.m {
        return Err(Error::LevelMismatch(a.m, b.m));
    }
    rule.require(a.m, 0, 0)?;
    let grid = BasisGrid::build(a.m, rule);
    let mut total = Complex64::new(0.0, 0.0);
    for n in 0..grid.node_count() {
        let row = grid.row(n);
        let va: Complex64 = row.iter().zip(&a.coeffs).map(|(e, c)| e * c).sum();
        let vb: Complex64 = row.iter().zip(&b.coeffs).map(|(e, c)| e * c).sum();
        total += va.conj() * vb * grid.weights[n];
    }
    Ok(total)
}

/// Weighted basis values `e_k (1+|z|²)^{-m/2}` at every quadrature node.
#[derive(Clone, Debug)]
pub struct BasisGrid {
    m: u32,
    /// `(s, 1-s, φ)` per node.
    pub nodes: Vec<(f64, f64, f64)>,
    /// Full quadrature weight (radial × angular) per node.
    pub weights: Vec<f64>,
    values: Vec<Complex64>,
}

impl BasisGrid {
    pub(crate) fn build(m: u32, rule: &QuadratureRule) -> Self {
        let dim = dimension(m);
        let lnf = ln_factorials(m as usize);
        let mut nodes = Vec::with_capacity(rule.node_count());
        let mut weights = Vec::with_capacity(rule.node_count());
        let mut values = Vec::with_capacity(rule.node_count() * dim);
        for node in rule.radial_nodes() {
            let amps = basis_amplitudes(&lnf, m as usize, node.s, node.one_minus_s);
            for l in 0..rule.angular_count() {
                let phi = rule.angle(l);
                nodes.push((node.s, node.one_minus_s, phi));
                weights.push(node.weight * rule.angular_weight());
                values.extend(amps.iter().enumerate().map(|(k, &a)| Complex64::from_polar(a, k as f64 * phi)));
            }
        }
        Self {
            m,
            nodes,
            weights,
            values,
        }
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn row(&self, n: usize) -> &[Complex64] {
        let dim = dimension(self.m);
        &self.values[n * dim..(n + 1) * dim]
    }

    pub fn gram(&self) -> DMatrix<Complex64> {
        let dim = dimension(self.m);
        let mut g = DMatrix::zeros(dim, dim);
        for n in 0..self.node_count() {
            let row = self.row(n);
            let w = self.weights[n];
            for j in 0..dim {
                let cj = row[j].conj() * w;
                for k in 0..dim {
                    g[(j, k)] += cj * row[k];
                }
            }
        }
        g
    }

    pub fn gram_defect(&self) -> f64 {
        let g = self.gram();
        let dim = dimension(self.m);
        let mut worst = 0.0f64;
        for j in 0..dim {
            for k in 0..dim {
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((g[(j, k)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Tabulates the basis on the rule's nodes and verifies orthonormality.
pub fn basis_eval_grid(m: u32, rule: &QuadratureRule) -> Result<BasisGrid> {
    const MAX_TABLE: usize = 1 << 26;
    let size = rule.node_count() * dimension(m);
    if size > MAX_TABLE {
        return Err(Error::Capacity {
            what: "basis grid entries",
            requested: size,
            limit: MAX_TABLE,
        });
    }
    let grid = BasisGrid::build(m, rule);
    let defect = grid.gram_defect();
    if defect > GRAM_TOLERANCE {
        return Err(Error::UnderResolved(format!(
            "Gram matrix of level {m} deviates from identity by {defect:.3e}"
        )));
    }
    Ok(grid)
}

/// Coherent state peaked at `z0`, represented by `(1 + z̄0 z)^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentState {
    pub m: u32,
    pub z0: Complex64,
    pub section: SectionVector,
}

impl CoherentState {
    /// Closed-form norm `(2π/(m+1)) (1+|z0|²)^m`.
    pub fn expected_norm_sqr(&self) -> f64 {
        2.0 * PI / (self.m as f64 + 1.0) * (1.0 + self.z0.norm_sqr()).powi(self.m as i32)
    }

    /// `(1+|z0|²)^m exp(-m D(z0, x))`, the pointwise norm predicted by the diastasis.
    pub fn density_from_diastasis(&self, x: &SpherePoint) -> f64 {
        let d = diastasis(&SpherePoint::from_z(self.z0), x);
        let m = self.m as f64;
        ((1.0 + self.z0.norm_sqr()).ln() * m - m * d).exp()
    }
}

/// Coefficients `sqrt(2π/(m+1)) sqrt(C(m,k)) z̄0^k`.
pub fn coherent_state(m: u32, z0: Complex64) -> CoherentState {
    let lnf = ln_factorials(m as usize);
    let pref = (2.0 * PI / (m as f64 + 1.0)).sqrt();
    let coeffs = (0..=m as usize)
        .map(|k| pref * (0.5 * ln_binomial(&lnf, m as usize, k)).exp() * z0.conj().powu(k as u32))
        .collect();
    CoherentState {
        m,
        z0,
        section: SectionVector { m, coeffs },
    }
}

/// Unit-norm coherent state at any point, including the south pole.
///
/// Equal to the normalised [`coherent_state`] at finite points.
pub fn coherent_state_at(m: u32, p: &SpherePoint) -> SectionVector {
    let lnf = ln_factorials(m as usize);
    let s = p.radial();
    let t = p.radial_complement();
    let phi = p.azimuth();
    let coeffs = (0..=m as usize)
        .map(|k| {
            let mag = if k > 0 && s == 0.0 || k < m as usize && t == 0.0 {
                0.0
            } else {
                let mut e = ln_binomial(&lnf, m as usize, k);
                if k > 0 {
                    e += k as f64 * s.ln();
                }
                if k < m as usize {
                    e += (m as usize - k) as f64 * t.ln();
                }
                (0.5 * e).exp()
            };
            Complex64::from_polar(mag, -(k as f64) * phi)
        })
        .collect();
    SectionVector { m, coeffs }
}

#[derive(Serialize, Deserialize)]
struct SectionRepr {
    m: u32,
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for SectionVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SectionRepr {
            m: self.m,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SectionVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = SectionRepr::deserialize(deserializer)?;
        let coeffs = repr.coeffs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        SectionVector::new(repr.m, coeffs).map_err(serde::de::Error::custom)
    }
}
