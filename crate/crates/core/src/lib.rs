//! Berezin-Toeplitz and geometric quantization of the Riemann sphere.
//!
//! The crate builds the quantum operators attached to classical observables
//! on CP¹ = S² at every tensor power `m` of the hyperplane bundle and measures
//! how they approach the classical Poisson algebra as `m → ∞`.
//!
//! Layout:
//!
//! * [`geometry`]: points, Kähler conventions, diastasis, product quadrature.
//! * [`symbol`]: polynomial observables modulo the sphere relation, with
//!   product, Poisson bracket, Laplacian and the first star-product cochain.
//! * [`hilbert`]: holomorphic sections of `L^m`, coherent states, kernel data.
//! * [`operators`]: Toeplitz and prequantum matrices, norms, commutators.
//! * [`lab`]: convergence experiments, rate fits and convention calibration.
//!
//! Matrix assembly runs on rayon when the `parallel` feature is enabled
//! (default). Every reduction has a fixed order, so parallel and sequential
//! results are bit-identical.

#![allow(clippy::needless_range_loop)]

pub mod chart;
pub mod error;
pub mod geometry;
pub mod hilbert;
pub mod lab;
mod numeric;
pub mod operators;
pub mod par;
pub mod symbol;

pub use error::{Error, Result};
pub use geometry::{KahlerConventions, QuadratureRule, SpherePoint};
pub use hilbert::{CoherentState, SectionVector};
pub use operators::QuantumOperator;
pub use par::Execution;
pub use symbol::Symbol;

pub use num_complex::Complex64;
