//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the classical real Jacobi rotation to the resulting
//! real symmetric 2x2 block. Accumulating both into `V` gives `A = V Λ V*`.

use num_complex::Complex64;

use super::HermitianMatrix;
use crate::error::{Error, Result};
use crate::matrix::CMatrix;

/// Convergence threshold on `off(A) / ‖A‖_F`.
pub const JACOBI_TOLERANCE: f64 = 1e-13;
/// Maximum number of full sweeps before giving up.
pub const JACOBI_SWEEP_BUDGET: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the unit eigenvector for `eigenvalues[j]`.
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> HermitianMatrix {
        HermitianMatrix::from_spectral(&self.eigenvalues, &self.vectors)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("dimension is at least 1")
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

pub fn eigendecompose(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let mut work = a.as_complex().clone();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = JACOBI_TOLERANCE * scale;

    let mut converged = off_diagonal_norm(&work) <= target;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_SWEEP_BUDGET {
            return Err(Error::NonConvergence {
                sweeps,
                off_norm: off_diagonal_norm(&work),
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut work, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&work) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[(i, i)].re.total_cmp(&work[(j, j)].re).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| work[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, new_col)] = v[(row, old_col)];
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        vectors,
    })
}

/// Annihilates `a[p][q]` with `J = diag(1, conj(e)) · G` acting on rows/cols `p, q`.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    if t == 0.0 {
        return;
    }
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J entries on the (p, q) block.
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    let n = a.rows();
    // A <- A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    // A <- J* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);
    // V <- V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn residuals(a: &HermitianMatrix, e: &EigenDecomposition) -> (f64, f64) {
        let recon = e.reconstruct().checked_sub(a).unwrap().frobenius_norm();
        (recon, e.vectors.isometry_defect())
    }

    #[test]
    fn identity_spectrum() {
        let e = eigendecompose(&HermitianMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
        assert!(e.vectors.isometry_defect() < 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = eigendecompose(&x).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = HermitianMatrix::from_parts(
            &[vec![0.0, 0.0], vec![0.0, 0.0]],
            Some(&[vec![0.0, -1.0], vec![1.0, 0.0]]),
        )
        .unwrap();
        let e = eigendecompose(&y).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
        let (recon, orth) = residuals(&y, &e);
        assert!(recon < 1e-14 && orth < 1e-14);
    }

    #[test]
    fn zero_matrix_is_already_diagonal() {
        let e = eigendecompose(&HermitianMatrix::zeros(3)).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn random_dim8_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_hermitian(8, &mut rng);
        let e = eigendecompose(&a).unwrap();
        let (recon, orth) = residuals(&a, &e);
        assert!(recon <= 1e-10 * a.frobenius_norm().max(1.0), "{recon}");
        assert!(orth <= 1e-10, "{orth}");
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn trace_is_sum_of_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=16 {
            let a = random_hermitian(n, &mut rng);
            let e = eigendecompose(&a).unwrap();
            let sum: f64 = e.eigenvalues.iter().sum();
            assert!((sum - a.trace()).abs() < 1e-11 * (1.0 + a.frobenius_norm()));
        }
    }

    #[test]
    fn clustered_spectrum_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = CMatrix::random_unitary(6, &mut rng);
        let values = [1.0, 1.0, 1.0 + 1e-13, 2.0, 2.0, 2.0 - 1e-13];
        let a = HermitianMatrix::from_spectral(&values, &u);
        let e = eigendecompose(&a).unwrap();
        let (recon, orth) = residuals(&a, &e);
        assert!(recon < 1e-12 && orth < 1e-12);
    }
}
