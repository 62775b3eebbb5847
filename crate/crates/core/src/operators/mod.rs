//! Quantum operators at level `m`: dense `(m+1)×(m+1)` matrices in the
//! orthonormal section basis.

mod assembly;
mod exact;
mod kernel;

pub use assembly::{prequantum, prequantum_with, toeplitz, toeplitz_auto, toeplitz_with, tuynman_rhs};
pub use exact::toeplitz_exact;
pub use kernel::{kernel_apply, kernel_matrix};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hilbert::{dimension, SectionVector};

/// Binary header of the raw operator format.
pub const BINARY_MAGIC: &[u8; 8] = b"BTQOPV01";

const POWER_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumOperator {
    m: u32,
    entries: DMatrix<Complex64>,
    hermitian: bool,
}

impl QuantumOperator {
    pub fn from_matrix(m: u32, entries: DMatrix<Complex64>, hermitian: bool) -> Result<Self> {
        let dim = dimension(m);
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::Invalid(format!(
                "level {m} needs a {dim}×{dim} matrix, got {}×{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { m, entries, hermitian })
    }

    pub fn identity(m: u32) -> Self {
        let dim = dimension(m);
        Self {
            m,
            entries: DMatrix::identity(dim, dim),
            hermitian: true,
        }
    }

    pub fn zeros(m: u32) -> Self {
        let dim = dimension(m);
        Self {
            m,
            entries: DMatrix::zeros(dim, dim),
            hermitian: true,
        }
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        self.entries[(j, k)]
    }

    /// Whether the operator is known to be Hermitian (set for Toeplitz
    /// operators of real symbols and preserved by real-linear combinations).
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn anti_hermiticity_defect(&self) -> f64 {
        (&self.entries + self.entries.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            m: self.m,
            entries: self.entries.map(|v| v * c),
            hermitian: self.hermitian && c.im == 0.0,
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Multiplication by `i`; maps Hermitian to anti-Hermitian.
    pub fn times_i(&self) -> Self {
        self.scale(Complex64::new(0.0, 1.0))
    }

    fn check_level(&self, other: &Self) -> Result<()> {
        if self.m == other.m {
            Ok(())
        } else {
            Err(Error::LevelMismatch(self.m, other.m))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(Self {
            m: self.m,
            entries: &self.entries + &other.entries,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(Self {
            m: self.m,
            entries: &self.entries - &other.entries,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(Self {
            m: self.m,
            entries: &self.entries * &other.entries,
            hermitian: false,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m,
            entries: self.entries.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn apply(&self, s: &SectionVector) -> Result<SectionVector> {
        if s.level() != self.m {
            return Err(Error::LevelMismatch(self.m, s.level()));
        }
        let v = nalgebra::DVector::from_column_slice(s.coeffs());
        let out = &self.entries * v;
        SectionVector::new(self.m, out.iter().copied().collect())
    }

    /// `⟨s, A s⟩`.
    pub fn expectation(&self, s: &SectionVector) -> Result<Complex64> {
        s.inner(&self.apply(s)?)
    }

    /// Eigenvalues of the Hermitian part `(A + A*)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.entries + self.entries.adjoint()).map(|v| v * 0.5);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.hermitian_eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Operator norm (largest singular value).
    ///
    /// Hermitian operators use `max |λ|`; everything else uses the largest
    /// eigenvalue of `A*A` from a dense Hermitian eigensolve.
    pub fn operator_norm(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        if self.hermitian {
            return self
                .hermitian_eigenvalues()
                .iter()
                .fold(0.0f64, |acc, v| acc.max(v.abs()));
        }
        let gram = self.entries.adjoint() * &self.entries;
        let top = gram.symmetric_eigenvalues().iter().copied().fold(0.0f64, f64::max);
        top.max(0.0).sqrt()
    }

    /// Norm by power iteration on `A*A` from the normalised all-ones vector.
    ///
    /// Returns the estimate and whether the Rayleigh quotient settled to
    /// relative `1e-13` within `max_iter` steps.
    pub fn power_iteration_norm(&self, max_iter: usize) -> (f64, bool) {
        let dim = self.dim();
        let gram = self.entries.adjoint() * &self.entries;
        let mut v = nalgebra::DVector::from_element(dim, Complex64::new(1.0 / (dim as f64).sqrt(), 0.0));
        let mut last = f64::NAN;
        for _ in 0..max_iter {
            let w = &gram * &v;
            let rq = v.dotc(&w).re;
            let n = w.norm();
            if n == 0.0 {
                return (0.0, true);
            }
            v = w / Complex64::new(n, 0.0);
            if (rq - last).abs() <= POWER_TOLERANCE * rq.abs() {
                return (rq.max(0.0).sqrt(), true);
            }
            last = rq;
        }
        (last.max(0.0).sqrt(), false)
    }

    /// Little-endian `f64` pairs (re, im), row-major, after [`BINARY_MAGIC`].
    pub fn to_bytes(&self) -> Vec<u8> {
        let dim = self.dim();
        let mut out = Vec::with_capacity(8 + 16 * dim * dim);
        out.extend_from_slice(BINARY_MAGIC);
        for j in 0..dim {
            for k in 0..dim {
                let c = self.entries[(j, k)];
                out.extend_from_slice(&c.re.to_le_bytes());
                out.extend_from_slice(&c.im.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 || &bytes[..8] != BINARY_MAGIC {
            return Err(Error::Format("missing BTQOPV01 header".into()));
        }
        let body = &bytes[8..];
        if !body.len().is_multiple_of(16) {
            return Err(Error::Format("payload is not a whole number of complex entries".into()));
        }
        let count = body.len() / 16;
        let dim = (count as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != count {
            return Err(Error::Format(format!("{count} entries do not form a square matrix")));
        }
        let read = |i: usize| f64::from_le_bytes(body[8 * i..8 * i + 8].try_into().expect("8 bytes"));
        let entries = DMatrix::from_fn(dim, dim, |j, k| {
            let n = j * dim + k;
            Complex64::new(read(2 * n), read(2 * n + 1))
        });
        let mut op = Self {
            m: (dim - 1) as u32,
            entries,
            hermitian: false,
        };
        op.hermitian = op.hermiticity_defect() == 0.0;
        Ok(op)
    }
}

/// `AB - BA`.
pub fn commutator(a: &QuantumOperator, b: &QuantumOperator) -> Result<QuantumOperator> {
    a.check_level(b)?;
    Ok(QuantumOperator {
        m: a.m,
        entries: &a.entries * &b.entries - &b.entries * &a.entries,
        hermitian: false,
    })
}

pub fn operator_norm(a: &QuantumOperator) -> f64 {
    a.operator_norm()
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    m: u32,
    rows: Vec<Vec<[f64; 2]>>,
}

impl Serialize for QuantumOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let dim = self.dim();
        OperatorRepr {
            m: self.m,
            rows: (0..dim)
                .map(|j| (0..dim).map(|k| [self.entries[(j, k)].re, self.entries[(j, k)].im]).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuantumOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = OperatorRepr::deserialize(deserializer)?;
        let dim = dimension(repr.m);
        if repr.rows.len() != dim || repr.rows.iter().any(|r| r.len() != dim) {
            return Err(serde::de::Error::custom(format!("level {} needs {dim}×{dim} rows", repr.m)));
        }
        let entries = DMatrix::from_fn(dim, dim, |j, k| Complex64::new(repr.rows[j][k][0], repr.rows[j][k][1]));
        let mut op = QuantumOperator {
            m: repr.m,
            entries,
            hermitian: false,
        };
        op.hermitian = op.hermiticity_defect() == 0.0;
        Ok(op)
    }
}
