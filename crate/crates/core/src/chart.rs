//! Exact calculus in the stereographic chart.
//!
//! Functions on the finite chart are represented as `N(z, z̄) / (1+zz̄)^p`
//! with `N` a polynomial in the independent variables `z` and `z̄`.
//! Derivatives are exact, so identities such as the prequantum curvature
//! condition and the chart forms of the bracket and Laplacian can be checked
//! without finite differences.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Polynomial in `z` and `z̄`: key `(a, b)` stands for `z^a z̄^b`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ZPoly {
    terms: BTreeMap<(u32, u32), Complex64>,
}

impl ZPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(a: u32, b: u32, c: Complex64) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    /// `z`
    pub fn z() -> Self {
        Self::monomial(1, 0, Complex64::new(1.0, 0.0))
    }

    /// `z̄`
    pub fn zbar() -> Self {
        Self::monomial(0, 1, Complex64::new(1.0, 0.0))
    }

    /// `1 + zz̄`, the denominator of every stereographic expression.
    pub fn conformal() -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self::monomial(0, 0, one) + Self::monomial(1, 1, one)
    }

    fn add_term(&mut self, a: u32, b: u32, c: Complex64) {
        let slot = self.terms.entry((a, b)).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
        if *slot == Complex64::new(0.0, 0.0) {
            self.terms.remove(&(a, b));
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero();
        for (&(a, b), &v) in &self.terms {
            out.add_term(a, b, v * c);
        }
        out
    }

    pub fn d_z(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), &v) in &self.terms {
            if a > 0 {
                out.add_term(a - 1, b, v * a as f64);
            }
        }
        out
    }

    pub fn d_zbar(&self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), &v) in &self.terms {
            if b > 0 {
                out.add_term(a, b - 1, v * b as f64);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(Complex64::new(1.0, 0.0));
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        self.terms
            .iter()
            .map(|(&(a, b), &v)| v * z.powu(a) * zb.powu(b))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<'a> Add<&'a ZPoly> for &'a ZPoly {
    type Output = ZPoly;
    fn add(self, rhs: &ZPoly) -> ZPoly {
        let mut out = self.clone();
        for (&(a, b), &v) in &rhs.terms {
            out.add_term(a, b, v);
        }
        out
    }
}

impl Add for ZPoly {
    type Output = ZPoly;
    fn add(self, rhs: ZPoly) -> ZPoly {
        &self + &rhs
    }
}

impl<'a> Sub<&'a ZPoly> for &'a ZPoly {
    type Output = ZPoly;
    fn sub(self, rhs: &ZPoly) -> ZPoly {
        self + &(-rhs)
    }
}

impl Neg for &ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl<'a> Mul<&'a ZPoly> for &'a ZPoly {
    type Output = ZPoly;
    fn mul(self, rhs: &ZPoly) -> ZPoly {
        let mut out = ZPoly::zero();
        for (&(a, b), &u) in &self.terms {
            for (&(c, d), &v) in &rhs.terms {
                out.add_term(a + c, b + d, u * v);
            }
        }
        out
    }
}

/// `num / (1+zz̄)^power`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartFn {
    pub num: ZPoly,
    pub power: u32,
}

impl ChartFn {
    pub fn new(num: ZPoly, power: u32) -> Self {
        Self { num, power }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(ZPoly::constant(Complex64::new(c, 0.0)), 0)
    }

    /// Ambient coordinate `x_i` (i = 0, 1, 2) of the point with chart value z:
    /// `x1 + i x2 = 2z/(1+zz̄)`, `x3 = (1-zz̄)/(1+zz̄)`.
    pub fn coordinate(i: usize) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let num = match i {
            0 => ZPoly::z() + ZPoly::zbar(),
            1 => (&ZPoly::z() - &ZPoly::zbar()).scale(Complex64::new(0.0, -1.0)),
            2 => &ZPoly::constant(one) - &ZPoly::monomial(1, 1, one),
            _ => panic!("coordinate index {i} out of range"),
        };
        Self::new(num, 1)
    }

    fn lift(&self, power: u32) -> ZPoly {
        debug_assert!(power >= self.power);
        &self.num * &ZPoly::conformal().pow(power - self.power)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.num.scale(c), self.power)
    }

    pub fn d_z(&self) -> Self {
        // (N_z P - p N P_z) / P^(p+1), with P_z = z̄
        let p = ZPoly::conformal();
        let lhs = &self.num.d_z() * &p;
        let rhs = (&self.num * &ZPoly::zbar()).scale(Complex64::new(self.power as f64, 0.0));
        Self::new(&lhs - &rhs, self.power + 1)
    }

    pub fn d_zbar(&self) -> Self {
        let p = ZPoly::conformal();
        let lhs = &self.num.d_zbar() * &p;
        let rhs = (&self.num * &ZPoly::z()).scale(Complex64::new(self.power as f64, 0.0));
        Self::new(&lhs - &rhs, self.power + 1)
    }

    /// Multiplies by `(1+zz̄)^k`.
    pub fn times_conformal(&self, k: u32) -> Self {
        if self.power >= k {
            Self::new(self.num.clone(), self.power - k)
        } else {
            Self::new(&self.num * &ZPoly::conformal().pow(k - self.power), 0)
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / (1.0 + z.norm_sqr()).powi(self.power as i32)
    }
}

impl<'a> Add<&'a ChartFn> for &'a ChartFn {
    type Output = ChartFn;
    fn add(self, rhs: &ChartFn) -> ChartFn {
        let p = self.power.max(rhs.power);
        ChartFn::new(&self.lift(p) + &rhs.lift(p), p)
    }
}

impl<'a> Sub<&'a ChartFn> for &'a ChartFn {
    type Output = ChartFn;
    fn sub(self, rhs: &ChartFn) -> ChartFn {
        let p = self.power.max(rhs.power);
        ChartFn::new(&self.lift(p) - &rhs.lift(p), p)
    }
}

impl<'a> Mul<&'a ChartFn> for &'a ChartFn {
    type Output = ChartFn;
    fn mul(self, rhs: &ChartFn) -> ChartFn {
        ChartFn::new(&self.num * &rhs.num, self.power + rhs.power)
    }
}

/// `∂_z ∂_z̄ log(1+zz̄)` as an exact chart function.
pub fn ddbar_log_conformal() -> ChartFn {
    // ∂_z (P_z̄ / P) = (P P_zz̄ - P_z P_z̄) / P²
    let p = ZPoly::conformal();
    let num = &(&p * &p.d_zbar().d_z()) - &(&p.d_z() * &p.d_zbar());
    ChartFn::new(num, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_lie_on_the_sphere() {
        let z = Complex64::new(0.7, -1.3);
        let r: f64 = (0..3).map(|i| ChartFn::coordinate(i).eval(z).norm_sqr()).sum();
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_x3() {
        // ∂_z̄ x3 = -2z/(1+zz̄)²
        let d = ChartFn::coordinate(2).d_zbar();
        let z = Complex64::new(0.4, 0.9);
        let expect = -2.0 * z / (1.0 + z.norm_sqr()).powi(2);
        assert!((d.eval(z) - expect).norm() < 1e-14);
    }

    #[test]
    fn ddbar_log_is_kahler_density() {
        let f = ddbar_log_conformal();
        for z in [Complex64::new(0.0, 0.0), Complex64::new(1.5, -0.2)] {
            let g = 1.0 / (1.0 + z.norm_sqr()).powi(2);
            assert!((f.eval(z).re - g).abs() < 1e-15);
        }
    }
}
