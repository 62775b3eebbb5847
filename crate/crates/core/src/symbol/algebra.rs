//! Poisson bracket, Laplace–Beltrami operator and the first star-product
//! cochain, all acting on normal-form symbols.

use num_complex::Complex64;

use super::Symbol;
use crate::geometry::{C1Ordering, KahlerConventions};

/// Levi-Civita triples `(i, j, k)` with sign `ε_ijk`.
const EPSILON: [(usize, usize, usize, f64); 6] = [
    (0, 1, 2, 1.0),
    (1, 2, 0, 1.0),
    (2, 0, 1, 1.0),
    (1, 0, 2, -1.0),
    (2, 1, 0, -1.0),
    (0, 2, 1, -1.0),
];

/// `{f, g}` as the biderivation with `{x_i, x_j} = c ε_ijk x_k`.
///
/// The sphere relation generates a Poisson ideal (`Σ x_i²` is a Casimir), so
/// the bracket is well defined on normal forms.
pub fn poisson_bracket(f: &Symbol, g: &Symbol, conv: &KahlerConventions) -> Symbol {
    let df: Vec<Symbol> = (0..3).map(|i| f.partial(i)).collect();
    let dg: Vec<Symbol> = (0..3).map(|i| g.partial(i)).collect();
    let mut out = Symbol::zero();
    for &(i, j, k, sign) in &EPSILON {
        if df[i].is_zero() || dg[j].is_zero() {
            continue;
        }
        let term = &(&df[i] * &dg[j]) * &Symbol::coordinate(k);
        out = &out + &term.scale_real(sign * conv.poisson_structure_constant);
    }
    out
}

/// Laplace–Beltrami operator of the metric `g(X,Y) = ω(X,IY)`.
///
/// Uses `Δ_{S²} p = (Δ_{ℝ³} p - Λ(Λ+1) p)|_{r=1}` with the Euler operator
/// `Λ`, then applies the sign and scale from the conventions.
pub fn laplace_beltrami(f: &Symbol, conv: &KahlerConventions) -> Symbol {
    let factor = conv.laplace_sign.value() * conv.laplace_scale;
    let mut terms = Vec::new();
    for (&e, &c) in f.terms() {
        let d = (e[0] + e[1] + e[2]) as f64;
        terms.push((e, -c * d * (d + 1.0)));
        for i in 0..3 {
            if e[i] >= 2 {
                let mut lower = e;
                lower[i] -= 2;
                terms.push((lower, c * (e[i] * (e[i] - 1)) as f64));
            }
        }
    }
    Symbol::from_terms(terms.into_iter().map(|(e, c)| (e, c * factor)))
}

/// Coefficient `G_ij = (1+zz̄)² ∂_z̄x_i ∂_zx_j` of the contraction
/// `C₁(f,g) = Σ G_ij ∂_if ∂_jg`, re-expressed in ambient coordinates:
/// `G_ij = δ_ij - x_i x_j - i(c/2) ε_ijk x_k`.
pub fn c1_metric(i: usize, j: usize, conv: &KahlerConventions) -> Symbol {
    let one = Complex64::new(1.0, 0.0);
    let mut g = &Symbol::complex_constant(if i == j { one } else { Complex64::new(0.0, 0.0) })
        - &(&Symbol::coordinate(i) * &Symbol::coordinate(j));
    let half_c = 0.5 * conv.poisson_structure_constant;
    for &(a, b, k, sign) in &EPSILON {
        if a == i && b == j {
            g = &g + &Symbol::coordinate(k).scale(Complex64::new(0.0, -half_c * sign));
        }
    }
    g
}

/// `(1+zz̄)² ∂_z̄f ∂_zg` as a symbol.
pub fn c1_candidate(f: &Symbol, g: &Symbol, conv: &KahlerConventions) -> Symbol {
    let df: Vec<Symbol> = (0..3).map(|i| f.partial(i)).collect();
    let dg: Vec<Symbol> = (0..3).map(|i| g.partial(i)).collect();
    let mut out = Symbol::zero();
    for i in 0..3 {
        if df[i].is_zero() {
            continue;
        }
        for j in 0..3 {
            if dg[j].is_zero() {
                continue;
            }
            out = &out + &(&(&c1_metric(i, j, conv) * &df[i]) * &dg[j]);
        }
    }
    out
}

/// First star-product cochain under the ordering fixed in the conventions.
pub fn c1(f: &Symbol, g: &Symbol, conv: &KahlerConventions) -> Symbol {
    c1_with(f, g, conv, conv.c1_ordering)
}

pub(crate) fn c1_with(f: &Symbol, g: &Symbol, conv: &KahlerConventions, ordering: C1Ordering) -> Symbol {
    match ordering {
        C1Ordering::AntiholomorphicFirst => c1_candidate(f, g, conv),
        // -(1+zz̄)² ∂_zf ∂_z̄g is minus the candidate with its arguments swapped
        C1Ordering::HolomorphicFirst => -&c1_candidate(g, f, conv),
    }
}
