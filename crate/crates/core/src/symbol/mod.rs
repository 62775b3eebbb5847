//! Polynomial observables on S².
//!
//! A [`Symbol`] is a polynomial in the ambient coordinates `x1, x2, x3`
//! reduced modulo `x1² + x2² + x3² = 1`. The normal form keeps the power of
//! `x1` at most one, which is a Gröbner normal form for the single relation,
//! so two symbols agree as functions on the sphere iff their coefficient maps
//! are equal.

mod algebra;
mod parse;
mod supnorm;

pub use algebra::{c1, c1_candidate, c1_metric, laplace_beltrami, poisson_bracket};
pub(crate) use algebra::c1_with;
pub use parse::{parse, parse_expr, SymbolExpr};
pub use supnorm::{sup_norm, sup_norm_point};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::geometry::SpherePoint;

/// Exponents of `(x1, x2, x3)`.
pub type Exponent = [u32; 3];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Symbol {
    terms: BTreeMap<Exponent, Complex64>,
}

impl Symbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::complex_constant(Complex64::new(c, 0.0))
    }

    pub fn complex_constant(c: Complex64) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    /// Coordinate `x_{i+1}` for `i` in `0..3`.
    pub fn coordinate(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        Self::monomial(e, Complex64::new(1.0, 0.0))
    }

    pub fn x1() -> Self {
        Self::coordinate(0)
    }

    pub fn x2() -> Self {
        Self::coordinate(1)
    }

    pub fn x3() -> Self {
        Self::coordinate(2)
    }

    /// `c · x1^a x2^b x3^c`, reduced.
    pub fn monomial(e: Exponent, c: Complex64) -> Self {
        let mut s = Self::zero();
        s.accumulate(e, c);
        s
    }

    /// Builds a symbol from arbitrary (possibly unreduced) terms.
    pub fn from_terms<I: IntoIterator<Item = (Exponent, Complex64)>>(terms: I) -> Self {
        let mut s = Self::zero();
        for (e, c) in terms {
            s.accumulate(e, c);
        }
        s
    }

    fn accumulate(&mut self, e: Exponent, c: Complex64) {
        if c == ZERO {
            return;
        }
        if e[0] >= 2 {
            // x1² = 1 - x2² - x3²
            let base = [e[0] - 2, e[1], e[2]];
            self.accumulate(base, c);
            self.accumulate([base[0], base[1] + 2, base[2]], -c);
            self.accumulate([base[0], base[1], base[2] + 2], -c);
            return;
        }
        let slot = self.terms.entry(e).or_insert(ZERO);
        *slot += c;
        if *slot == ZERO {
            self.terms.remove(&e);
        }
    }

    /// Normal-form terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: Exponent) -> Complex64 {
        self.terms.get(&e).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    /// Total degree of the normal form (0 for the zero symbol).
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| (e[0] + e[1] + e[2]) as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(&e, &v)| (e, v * c)))
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn conj(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&e, &v)| (e, v.conj())))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Ambient partial derivative `∂/∂x_{i+1}` of the normal-form polynomial.
    pub fn partial(&self, i: usize) -> Self {
        Self::from_terms(self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(&e, &v)| {
            let mut d = e;
            d[i] -= 1;
            (d, v * e[i] as f64)
        }))
    }

    pub fn eval_ambient(&self, x: [f64; 3]) -> Complex64 {
        let mut acc = ZERO;
        for (e, &c) in &self.terms {
            let v = x[0].powi(e[0] as i32) * x[1].powi(e[1] as i32) * x[2].powi(e[2] as i32);
            acc += c * v;
        }
        acc
    }

    pub fn eval(&self, p: &SpherePoint) -> Complex64 {
        self.eval_ambient(p.ambient())
    }

    /// Real part of the value; meaningful for real-flagged symbols.
    pub fn eval_real(&self, x: [f64; 3]) -> f64 {
        self.eval_ambient(x).re
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("symbol serialization is infallible")
    }
}

impl<'a> Add<&'a Symbol> for &'a Symbol {
    type Output = Symbol;
    fn add(self, rhs: &Symbol) -> Symbol {
        let mut out = self.clone();
        for (&e, &c) in &rhs.terms {
            out.accumulate(e, c);
        }
        out
    }
}

impl<'a> Sub<&'a Symbol> for &'a Symbol {
    type Output = Symbol;
    fn sub(self, rhs: &Symbol) -> Symbol {
        let mut out = self.clone();
        for (&e, &c) in &rhs.terms {
            out.accumulate(e, -c);
        }
        out
    }
}

impl Neg for &Symbol {
    type Output = Symbol;
    fn neg(self) -> Symbol {
        self.scale_real(-1.0)
    }
}

impl<'a> Mul<&'a Symbol> for &'a Symbol {
    type Output = Symbol;
    fn mul(self, rhs: &Symbol) -> Symbol {
        let mut out = Symbol::zero();
        for (a, &u) in &self.terms {
            for (b, &v) in &rhs.terms {
                out.accumulate([a[0] + b[0], a[1] + b[1], a[2] + b[2]], u * v);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Symbol {
            type Output = Symbol;
            fn $m(self, rhs: Symbol) -> Symbol {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Product of two symbols.
pub fn multiply(f: &Symbol, g: &Symbol) -> Symbol {
    f * g
}

/// Real symbols print in the parser's grammar, e.g. `0.3 + x1 - 2*x2*x3^2`.
impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            let constant = *e == [0, 0, 0];
            let mut mag = *c;
            if c.im == 0.0 {
                if c.re < 0.0 {
                    f.write_str(if n == 0 { "-" } else { " - " })?;
                    mag = -c;
                } else if n > 0 {
                    f.write_str(" + ")?;
                }
                if constant || mag.re != 1.0 {
                    write!(f, "{}", mag.re)?;
                }
            } else {
                if n > 0 {
                    f.write_str(" + ")?;
                }
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            let mut sep = !(constant || (c.im == 0.0 && mag.re == 1.0));
            for (i, &p) in e.iter().enumerate() {
                if p == 0 {
                    continue;
                }
                if sep {
                    f.write_str("*")?;
                }
                sep = true;
                match p {
                    1 => write!(f, "x{}", i + 1)?,
                    _ => write!(f, "x{}^{}", i + 1, p)?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    e: Exponent,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SymbolRepr {
    terms: Vec<TermRepr>,
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SymbolRepr {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| TermRepr { e, re: c.re, im: c.im })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SymbolRepr::deserialize(deserializer)?;
        Ok(Symbol::from_terms(
            repr.terms.into_iter().map(|t| (t.e, Complex64::new(t.re, t.im))),
        ))
    }
}
