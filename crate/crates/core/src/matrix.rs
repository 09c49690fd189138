//! Dense rectangular complex matrices.
//!
//! Used for the objects that are not Hermitian: eigenvector bases, isometries
//! and unitaries. Storage is row-major.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real and (optional) imaginary row lists.
    pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<Self> {
        let rows = re.len();
        let cols = re.first().map_or(0, Vec::len);
        if re.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("ragged `re` rows".into()));
        }
        if let Some(im) = im {
            if im.len() != rows || im.iter().any(|r| r.len() != cols) {
                return Err(Error::InvalidArgument(
                    "`im` shape differs from `re` shape".into(),
                ));
            }
        }
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let imag = im.map_or(0.0, |im| im[i][j]);
                data.push(Complex64::new(re[i][j], imag));
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn re_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].re).collect())
            .collect()
    }

    pub fn im_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].im).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                left: self.cols,
                right: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch {
                left: self.rows * self.cols,
                right: rhs.rows * rhs.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖M*M − I‖_F`; zero for an isometry.
    pub fn isometry_defect(&self) -> f64 {
        let gram = self
            .adjoint()
            .matmul(self)
            .expect("adjoint shapes always agree");
        gram.sub(&Self::identity(self.cols))
            .expect("gram matrix is square")
            .frobenius_norm()
    }

    /// Complex Gaussian matrix with i.i.d. standard normal real and imaginary parts.
    pub fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self { rows, cols, data }
    }

    /// Orthonormalizes the columns with modified Gram-Schmidt (two passes).
    ///
    /// Fails when the columns are numerically dependent.
    pub fn orthonormalize_columns(&self) -> Result<CMatrix> {
        let mut q = self.clone();
        for j in 0..q.cols {
            for _pass in 0..2 {
                for k in 0..j {
                    let mut dot = Complex64::new(0.0, 0.0);
                    for i in 0..q.rows {
                        dot += q[(i, k)].conj() * q[(i, j)];
                    }
                    for i in 0..q.rows {
                        let qik = q[(i, k)];
                        q[(i, j)] -= dot * qik;
                    }
                }
            }
            let norm = (0..q.rows).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return Err(Error::InvalidArgument(
                    "columns are numerically linearly dependent".into(),
                ));
            }
            for i in 0..q.rows {
                q[(i, j)] /= norm;
            }
        }
        Ok(q)
    }

    /// Random isometry `rows x cols` (`cols <= rows`) with Haar-distributed range.
    pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        assert!(cols <= rows, "an isometry cannot have more columns than rows");
        loop {
            if let Ok(q) = Self::gaussian(rows, cols, rng).orthonormalize_columns() {
                return q;
            }
        }
    }

    pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::random_isometry(n, n, rng)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_isometry_has_orthonormal_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, k) in [(1, 1), (4, 2), (6, 6), (16, 5)] {
            let v = CMatrix::random_isometry(n, k, &mut rng);
            assert!(v.isometry_defect() < 1e-13, "{n}x{k}");
        }
    }

    #[test]
    fn matmul_rejects_bad_shapes() {
        let a = CMatrix::zeros(2, 3);
        let b = CMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn adjoint_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = CMatrix::gaussian(3, 4, &mut rng);
        let b = CMatrix::gaussian(4, 2, &mut rng);
        let lhs = a.matmul(&b).unwrap().adjoint();
        let rhs = b.adjoint().matmul(&a.adjoint()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().frobenius_norm() < 1e-13);
    }
}
