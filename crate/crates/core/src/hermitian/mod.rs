//! Dense Hermitian matrices and the spectral machinery built on them.
//!
//! Every operator expression in the crate is a [`HermitianMatrix`]. The type
//! keeps `a[i][j] == conj(a[j][i])` exactly: inputs are symmetrized once at
//! construction, and the arithmetic below (sums, real scaling) preserves the
//! symmetry bit for bit.

mod calculus;
mod jacobi;
mod order;

pub use calculus::{apply_fn, apply_scalar_function, positive_part, spectral_bounds};
pub use jacobi::{eigendecompose, EigenDecomposition, JACOBI_SWEEP_BUDGET, JACOBI_TOLERANCE};
pub use order::{loewner_leq, LoewnerRelation, LoewnerVerdict, DEFAULT_PSD_TOL};

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// Relative asymmetry accepted (and symmetrized away) on construction.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: CMatrix,
}

impl HermitianMatrix {
    /// Validates and symmetrizes a square complex matrix.
    ///
    /// Asymmetry `‖A − A*‖_F` up to `1e-12 · ‖A‖_F` is averaged away; anything
    /// larger is rejected as [`Error::NotHermitian`].
    pub fn from_complex(m: CMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                left: m.rows(),
                right: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        let asymmetry = m.sub(&m.adjoint())?.frobenius_norm();
        let limit = HERMITIAN_INPUT_TOL * m.frobenius_norm();
        if asymmetry > limit {
            return Err(Error::NotHermitian { asymmetry, limit });
        }
        Ok(Self::symmetrize(m))
    }

    /// Hermitian part `(M + M*)/2` without any tolerance check.
    ///
    /// Used internally after products that are Hermitian in exact arithmetic.
    pub(crate) fn symmetrize(mut m: CMatrix) -> Self {
        let n = m.rows();
        for i in 0..n {
            m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Self { inner: m }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_complex(CMatrix::from_parts(rows, None)?)
    }

    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self> {
        Self::from_complex(CMatrix::from_parts(re, im)?)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    /// `c · I`.
    pub fn scalar(dim: usize, c: f64) -> Self {
        Self::diag(&vec![c; dim])
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut inner = CMatrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            inner[(i, i)] = Complex64::new(v, 0.0);
        }
        Self { inner }
    }

    /// `V · diag(values) · V*`, re-symmetrized.
    pub fn from_spectral(values: &[f64], vectors: &CMatrix) -> Self {
        let n = vectors.rows();
        let k = values.len();
        debug_assert_eq!(vectors.cols(), k);
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (l, &lambda) in values.iter().enumerate() {
                    acc += vectors[(i, l)] * vectors[(j, l)].conj() * lambda;
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
        Self::symmetrize(out)
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn as_complex(&self) -> &CMatrix {
        &self.inner
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).sum()
    }

    pub fn is_real(&self) -> bool {
        self.inner.as_slice().iter().all(|z| z.im == 0.0)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map_entries(|z| z * c)
    }

    /// `self + c · I`.
    pub fn shift(&self, c: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim() {
            out.inner[(i, i)] += c;
        }
        out
    }

    /// `a · self + b · I`.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        self.scale(a).shift(b)
    }

    /// `V* · self · V` for an `n x k` matrix `V`.
    pub fn congruence(&self, v: &CMatrix) -> Result<Self> {
        if v.rows() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: v.rows(),
            });
        }
        let product = v.adjoint().matmul(&self.inner)?.matmul(v)?;
        Ok(Self::symmetrize(product))
    }

    /// `U · self · U*`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        self.congruence(&u.adjoint())
    }

    /// Sum of a non-empty list of matrices of equal dimension.
    pub fn sum<'a, I>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a HermitianMatrix>,
    {
        let mut iter = items.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty matrix sum".into()))?;
        iter.try_fold(first.clone(), |acc, m| acc.checked_add(m))
    }

    fn zip_with(&self, rhs: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: rhs.dim(),
            });
        }
        let data = self
            .inner
            .as_slice()
            .iter()
            .zip(rhs.inner.as_slice())
            .map(|(&a, &b)| op(a, b))
            .collect();
        let n = self.dim();
        Ok(Self {
            inner: CMatrix::from_row_major(n, n, data)?,
        })
    }

    fn map_entries(&self, op: impl Fn(Complex64) -> Complex64) -> Self {
        let n = self.dim();
        let data = self.inner.as_slice().iter().map(|&z| op(z)).collect();
        Self {
            inner: CMatrix::from_row_major(n, n, data).expect("shape is preserved"),
        }
    }
}

// Operator sugar for same-dimension arithmetic; panics on mismatch, use the
// `checked_*` methods when dimensions come from untrusted input.
impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;

    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        self.checked_add(rhs).expect("dimension mismatch in matrix sum")
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;

    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        self.checked_sub(rhs)
            .expect("dimension mismatch in matrix difference")
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;

    fn mul(self, c: f64) -> HermitianMatrix {
        self.scale(c)
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;

    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

/// On-disk matrix object: `{"dim": n, "re": [[..]], "im": [[..]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl From<&HermitianMatrix> for MatrixFile {
    fn from(m: &HermitianMatrix) -> Self {
        Self {
            dim: m.dim(),
            re: m.inner.re_rows(),
            im: (!m.is_real()).then(|| m.inner.im_rows()),
        }
    }
}

impl TryFrom<MatrixFile> for HermitianMatrix {
    type Error = Error;

    fn try_from(file: MatrixFile) -> Result<Self> {
        if file.re.len() != file.dim || file.re.iter().any(|r| r.len() != file.dim) {
            return Err(Error::InvalidArgument(format!(
                "`re` is not {0}x{0}",
                file.dim
            )));
        }
        HermitianMatrix::from_parts(&file.re, file.im.as_deref())
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = MatrixFile::deserialize(d)?;
        HermitianMatrix::try_from(file).map_err(serde::de::Error::custom)
    }
}
