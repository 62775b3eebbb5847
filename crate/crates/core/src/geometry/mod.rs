//! Points, Kähler data and diastasis on CP¹.
//!
//! The Kähler form is `ω = i/(1+zz̄)² dz∧dz̄` in the quasi-global chart, so
//! the sphere has total area 2π: it is the round sphere of radius 1/√2.
//! `z = 0` is the north pole `x3 = +1`; the single point the chart misses is
//! the south pole.

mod quadrature;

pub use quadrature::{gauss_legendre, make_rule, make_rule_with, QuadratureRule, RadialNode, RuleLimits};

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chart::ddbar_log_conformal;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Chart {
    Finite(Complex64),
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    chart: Chart,
    x: [f64; 3],
}

impl SpherePoint {
    pub fn from_z(z: Complex64) -> Self {
        let d = 1.0 + z.norm_sqr();
        Self {
            chart: Chart::Finite(z),
            x: [2.0 * z.re / d, 2.0 * z.im / d, (1.0 - z.norm_sqr()) / d],
        }
    }

    pub fn infinity() -> Self {
        Self {
            chart: Chart::Infinity,
            x: [0.0, 0.0, -1.0],
        }
    }

    pub fn north() -> Self {
        Self::from_z(Complex64::new(0.0, 0.0))
    }

    pub fn south() -> Self {
        Self::infinity()
    }

    /// Point with polar angle `theta` from the north pole and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        if theta >= PI {
            return Self::infinity();
        }
        // z = tan(θ/2) e^{iφ}
        Self::from_z(Complex64::from_polar((0.5 * theta).tan(), phi))
    }

    /// Projects an ambient vector onto the sphere. The zero vector is rejected.
    pub fn from_ambient(x: [f64; 3]) -> Option<Self> {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r == 0.0 || !r.is_finite() {
            return None;
        }
        let u = [x[0] / r, x[1] / r, x[2] / r];
        if 1.0 + u[2] <= 0.0 {
            return Some(Self::infinity());
        }
        let z = Complex64::new(u[0], u[1]) / (1.0 + u[2]);
        Some(Self {
            chart: Chart::Finite(z),
            x: u,
        })
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn z(&self) -> Option<Complex64> {
        match self.chart {
            Chart::Finite(z) => Some(z),
            Chart::Infinity => None,
        }
    }

    pub fn ambient(&self) -> [f64; 3] {
        self.x
    }

    /// Radial variable `s = |z|²/(1+|z|²) = (1 - x3)/2` used by the quadrature.
    pub fn radial(&self) -> f64 {
        match self.chart {
            Chart::Finite(z) => z.norm_sqr() / (1.0 + z.norm_sqr()),
            Chart::Infinity => 1.0,
        }
    }

    /// `1 - s = 1/(1+|z|²)`, computed without cancellation.
    pub fn radial_complement(&self) -> f64 {
        match self.chart {
            Chart::Finite(z) => 1.0 / (1.0 + z.norm_sqr()),
            Chart::Infinity => 0.0,
        }
    }

    pub fn azimuth(&self) -> f64 {
        match self.chart {
            Chart::Finite(z) if z != Complex64::new(0.0, 0.0) => z.arg(),
            _ => 0.0,
        }
    }
}

/// Sign in front of the Laplace–Beltrami operator.
///
/// `Plus` is the analyst's convention (`Δ = div grad`, non-positive spectrum).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaplaceSign {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl LaplaceSign {
    pub fn value(self) -> f64 {
        match self {
            LaplaceSign::Plus => 1.0,
            LaplaceSign::Minus => -1.0,
        }
    }
}

/// Which derivative of the first argument enters the first star-product
/// cochain `C₁(f, g)`.
///
/// * `AntiholomorphicFirst`: `C₁(f,g) = (1+zz̄)² ∂_z̄f ∂_zg`
/// * `HolomorphicFirst`: `C₁(f,g) = -(1+zz̄)² ∂_zf ∂_z̄g`
///
/// Both antisymmetrize to `-i{f,g}`; they differ by a symmetric cochain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum C1Ordering {
    AntiholomorphicFirst,
    HolomorphicFirst,
}

impl C1Ordering {
    pub fn other(self) -> Self {
        match self {
            C1Ordering::AntiholomorphicFirst => C1Ordering::HolomorphicFirst,
            C1Ordering::HolomorphicFirst => C1Ordering::AntiholomorphicFirst,
        }
    }
}

impl fmt::Display for C1Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            C1Ordering::AntiholomorphicFirst => f.write_str("antiholomorphic-first"),
            C1Ordering::HolomorphicFirst => f.write_str("holomorphic-first"),
        }
    }
}

/// Normalisations the rest of the crate depends on.
///
/// The default value is what [`crate::lab::calibrate`] selects; calibration
/// re-derives it from operator experiments and is checked against it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KahlerConventions {
    pub total_area: f64,
    /// `c` in `{x_i, x_j} = c ε_ijk x_k`.
    pub poisson_structure_constant: f64,
    pub laplace_sign: LaplaceSign,
    /// Ratio between the Laplacian of `g(X,Y) = ω(X,IY)` and that of the unit sphere.
    pub laplace_scale: f64,
    pub c1_ordering: C1Ordering,
}

impl Default for KahlerConventions {
    fn default() -> Self {
        Self {
            total_area: 2.0 * PI,
            poisson_structure_constant: 2.0,
            laplace_sign: LaplaceSign::Plus,
            laplace_scale: 2.0,
            c1_ordering: C1Ordering::HolomorphicFirst,
        }
    }
}

impl KahlerConventions {
    pub fn with_poisson_sign(mut self, sign: f64) -> Self {
        self.poisson_structure_constant = sign.signum() * self.poisson_structure_constant.abs();
        self
    }

    pub fn with_laplace_sign(mut self, sign: LaplaceSign) -> Self {
        self.laplace_sign = sign;
        self
    }

    pub fn with_c1_ordering(mut self, ordering: C1Ordering) -> Self {
        self.c1_ordering = ordering;
        self
    }
}

/// Coefficient `G` of `ω = i G dz∧dz̄`.
pub fn kahler_density(z: Complex64) -> f64 {
    1.0 / (1.0 + z.norm_sqr()).powi(2)
}

/// Calabi's diastatic function of the Fubini–Study embedding.
///
/// Returns `f64::INFINITY` for antipodal pairs.
pub fn diastasis(p: &SpherePoint, q: &SpherePoint) -> f64 {
    match (p.chart, q.chart) {
        (Chart::Finite(a), Chart::Finite(b)) => {
            let overlap = (Complex64::new(1.0, 0.0) + a.conj() * b).norm_sqr();
            if overlap == 0.0 {
                return f64::INFINITY;
            }
            let d = ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr()) / overlap).ln();
            d.max(0.0)
        }
        (Chart::Infinity, Chart::Infinity) => 0.0,
        (Chart::Infinity, Chart::Finite(b)) | (Chart::Finite(b), Chart::Infinity) => {
            let r = b.norm_sqr();
            if r == 0.0 {
                f64::INFINITY
            } else {
                ((1.0 + r) / r).ln()
            }
        }
    }
}

/// Maximum defect of the prequantum condition for `L^m` over the sample
/// points: `-∂_z∂_z̄ log ĥ_m` against `m·G(z)` with `ĥ_m = (1+|z|²)^{-m}`.
pub fn curvature_check(m: u32, points: &[SpherePoint]) -> f64 {
    // log ĥ_m = -m log(1+zz̄), so the left side is m ∂∂̄ log(1+zz̄)
    let curvature = ddbar_log_conformal().scale(Complex64::new(m as f64, 0.0));
    points
        .iter()
        .filter_map(|p| p.z())
        .map(|z| (curvature.eval(z) - m as f64 * kahler_density(z)).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn chart_round_trip() {
        for z in [c(0.0, 0.0), c(0.3, -2.0), c(-5.0, 7.5), c(1e-3, 1e-4)] {
            let p = SpherePoint::from_z(z);
            let x = p.ambient();
            assert!((x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0).abs() < 1e-12);
            let back = SpherePoint::from_ambient(x).unwrap().z().unwrap();
            assert!((back - z).norm() <= 1e-12 * (1.0 + z.norm()));
        }
        assert_eq!(SpherePoint::infinity().ambient(), [0.0, 0.0, -1.0]);
        assert_eq!(SpherePoint::north().ambient(), [0.0, 0.0, 1.0]);
        assert_eq!(SpherePoint::from_ambient([0.0, 0.0, -2.0]), Some(SpherePoint::infinity()));
    }

    #[test]
    fn diastasis_values() {
        let o = SpherePoint::north();
        assert_eq!(diastasis(&o, &o), 0.0);
        let e = SpherePoint::from_z(c(1.0, 0.0));
        assert!((diastasis(&o, &e) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(diastasis(&o, &SpherePoint::infinity()), f64::INFINITY);
        let a = SpherePoint::from_z(c(0.5, 0.5));
        let anti = SpherePoint::from_z(-c(0.5, 0.5) / c(0.5, 0.5).norm_sqr());
        assert_eq!(diastasis(&a, &anti), f64::INFINITY);
        assert_eq!(diastasis(&SpherePoint::infinity(), &SpherePoint::infinity()), 0.0);
    }

    #[test]
    fn diastasis_against_chordal_form() {
        // D = -log((1 + p·q)/2) for unit vectors
        let pts = [c(0.2, 0.1), c(-1.4, 0.8), c(3.0, -0.5)];
        for a in pts {
            for b in pts {
                let (p, q) = (SpherePoint::from_z(a), SpherePoint::from_z(b));
                let (x, y) = (p.ambient(), q.ambient());
                let dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
                let expect = -((1.0 + dot) / 2.0).ln();
                assert!((diastasis(&p, &q) - expect).abs() < 1e-12);
                assert_eq!(diastasis(&p, &q), diastasis(&q, &p));
            }
        }
        let inf = SpherePoint::infinity();
        let q = SpherePoint::from_z(c(1.0, 0.0));
        assert!((diastasis(&inf, &q) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn prequantum_curvature() {
        let pts: Vec<_> = [c(0.0, 0.0), c(0.4, -0.3), c(2.0, 1.0)]
            .into_iter()
            .map(SpherePoint::from_z)
            .collect();
        assert_eq!(curvature_check(0, &pts), 0.0);
        let only_origin = [SpherePoint::north()];
        assert_eq!(curvature_check(1, &only_origin), 0.0);
        assert!(curvature_check(5, &pts) < 1e-12);
    }
}
