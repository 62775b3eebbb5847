//! Product quadrature for the Liouville measure.
//!
//! With `s = |z|²/(1+|z|²)` and `z = |z| e^{iφ}` the measure becomes
//! `Ω = ds dφ` on `[0,1] × [0,2π)`. Every matrix element at level `m` of a
//! polynomial symbol is a polynomial in `s` times a finite Fourier sum in
//! `φ`, so Gauss–Legendre in `s` and the uniform rule in `φ` are exact.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the (n-1-i)-th node in ascending order
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialNode {
    pub s: f64,
    /// `1 - s`, kept separately so factors `(1-s)^k` near the south pole keep
    /// full relative accuracy.
    pub one_minus_s: f64,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleLimits {
    pub max_radial: usize,
    pub max_angular: usize,
}

impl Default for RuleLimits {
    fn default() -> Self {
        Self {
            max_radial: 2048,
            max_angular: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    radial: Vec<RadialNode>,
    angular: usize,
}

impl QuadratureRule {
    /// Rule with `radial` Gauss nodes in `s` and `angular` uniform nodes in `φ`.
    pub fn new(radial: usize, angular: usize) -> Result<Self> {
        if radial == 0 || angular == 0 {
            return Err(Error::Invalid("quadrature needs at least one node per axis".into()));
        }
        let (t, w) = gauss_legendre(radial);
        let radial = t
            .iter()
            .zip(&w)
            .map(|(&t, &w)| RadialNode {
                s: 0.5 * (1.0 + t),
                one_minus_s: 0.5 * (1.0 - t),
                weight: 0.5 * w,
            })
            .collect();
        Ok(Self { radial, angular })
    }

    pub fn radial_nodes(&self) -> &[RadialNode] {
        &self.radial
    }

    pub fn angular_count(&self) -> usize {
        self.angular
    }

    pub fn node_count(&self) -> usize {
        self.radial.len() * self.angular
    }

    pub fn angle(&self, l: usize) -> f64 {
        2.0 * PI * l as f64 / self.angular as f64
    }

    pub fn angular_weight(&self) -> f64 {
        2.0 * PI / self.angular as f64
    }

    /// Highest polynomial degree in `s` integrated exactly.
    pub fn max_radial_degree(&self) -> usize {
        2 * self.radial.len() - 1
    }

    /// Highest `|q|` for which `e^{iqφ}` is integrated exactly.
    pub fn max_angular_frequency(&self) -> usize {
        self.angular - 1
    }

    /// Whether the rule covers level `m` with symbols of degree `degree`
    /// plus `extra` additional degrees on both axes.
    pub fn covers(&self, m: u32, degree: usize, extra: usize) -> bool {
        let m = m as usize;
        self.max_radial_degree() >= m + degree + extra
            && self.max_angular_frequency() >= 2 * m + degree + extra
    }

    pub(crate) fn require(&self, m: u32, degree: usize, extra: usize) -> Result<()> {
        if self.covers(m, degree, extra) {
            Ok(())
        } else {
            Err(Error::UnderResolved(format!(
                "rule (radial degree {}, angular frequency {}) cannot resolve level {m} with degree {}",
                self.max_radial_degree(),
                self.max_angular_frequency(),
                degree + extra
            )))
        }
    }

    /// `∫ f Ω` with `f` given as a function of `(s, 1-s, φ)`.
    ///
    /// Nodes are visited in a fixed order.
    pub fn integrate<F>(&self, mut f: F) -> Complex64
    where
        F: FnMut(f64, f64, f64) -> Complex64,
    {
        let dphi = self.angular_weight();
        let mut total = Complex64::new(0.0, 0.0);
        for node in &self.radial {
            let mut ring = Complex64::new(0.0, 0.0);
            for l in 0..self.angular {
                ring += f(node.s, node.one_minus_s, self.angle(l));
            }
            total += ring * (node.weight * dphi);
        }
        total
    }
}

/// Rule exact for all level-`m` matrix elements of symbols of degree `<= degree`.
pub fn make_rule(m: u32, degree: usize) -> Result<QuadratureRule> {
    make_rule_with(m, degree, 0, RuleLimits::default())
}

/// [`make_rule`] with `margin` extra degrees on both axes and explicit limits.
pub fn make_rule_with(m: u32, degree: usize, margin: usize, limits: RuleLimits) -> Result<QuadratureRule> {
    let m = m as usize;
    let radial_degree = m + degree + margin;
    let radial = radial_degree / 2 + 1;
    let angular = 2 * m + degree + margin + 1;
    if radial > limits.max_radial {
        return Err(Error::Capacity {
            what: "radial quadrature nodes",
            requested: radial,
            limit: limits.max_radial,
        });
    }
    if angular > limits.max_angular {
        return Err(Error::Capacity {
            what: "angular quadrature nodes",
            requested: angular,
            limit: limits.max_angular,
        });
    }
    QuadratureRule::new(radial, angular)
}
